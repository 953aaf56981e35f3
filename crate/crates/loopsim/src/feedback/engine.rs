//! The iteration engine: split, fit, recommend, select, commit, measure.

use log::{debug, info};
use rayon::prelude::*;

use crate::dataset::{split_train_test, Dataset, ItemIdx, ItemMeta, Origin, RatingStore, UserMeta};
use crate::error::{Error, Result};
use crate::feedback::acceptance::acceptance_probabilities;
use crate::feedback::config::{ExclusionMode, SimulationConfig};
use crate::feedback::events::SelectionEvent;
use crate::feedback::rating::synthesize_rating;
use crate::metrics::{
    aggregate_diversity, average_data_popularity, average_recommendation_popularity, compute_theta,
    genre_distribution, group_divergence, group_mean_taste_drift, group_population_divergence,
    kl_divergence, GenreDistribution, PopularityTable,
};
use crate::recommenders::fit;
use crate::report::IterationReport;
use crate::rng::{RngFactory, StreamKind};

/// Group labels the trajectory reports break out. Groups come from the
/// users file; datasets without M/F labels simply report `NA` in those
/// columns.
pub const MALE_GROUP: &str = "M";
pub const FEMALE_GROUP: &str = "F";

/// Expected popularity of the data after committing `committed`
/// selections whose popularity exceeds the data's by `theta`, with item
/// popularity frozen at the pre-commit table.
pub fn predict_next_popularity(data_pop: f64, data_size: u64, committed: u64, theta: f64) -> f64 {
    debug_assert!(data_size > 0);
    data_pop + (committed as f64 * theta) / ((data_size + committed) as f64)
}

/// One iteration's outcome: the report row plus every selection draw.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutput {
    pub report: IterationReport,
    pub events: Vec<SelectionEvent>,
}

/// A full run: the trajectory and the final store.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub reports: Vec<IterationReport>,
    pub store: RatingStore,
}

struct StagedSelection {
    item: ItemIdx,
    rank: usize,
    omega: Option<f64>,
    rating: Option<i32>,
    accepted: bool,
}

/// Drives the iterations over an evolving store. Construction freezes
/// the initial genre distributions that drift is measured against.
pub struct Simulation {
    store: RatingStore,
    users: Vec<UserMeta>,
    items: Vec<ItemMeta>,
    vocab_len: usize,
    config: SimulationConfig,
    rng: RngFactory,
    initial_per_user: Vec<Option<GenreDistribution>>,
    initial_population: Option<GenreDistribution>,
    pool: rayon::ThreadPool,
    next_iteration: u32,
}

impl Simulation {
    /// Starts a simulation with `data.store` as the initial rating data.
    pub fn new(data: Dataset, config: SimulationConfig) -> Result<Simulation> {
        Simulation::build(data, config, 1, false)
    }

    /// Resumes from a snapshot store whose `initial`-origin entries are
    /// the original dataset; drift baselines are rebuilt from those.
    pub fn from_snapshot(
        data: Dataset,
        config: SimulationConfig,
        next_iteration: u32,
    ) -> Result<Simulation> {
        Simulation::build(data, config, next_iteration, true)
    }

    fn build(
        data: Dataset,
        config: SimulationConfig,
        next_iteration: u32,
        initial_entries_only: bool,
    ) -> Result<Simulation> {
        config.validate()?;
        let Dataset {
            store,
            users,
            items,
            genres,
        } = data;
        if store.is_empty() {
            return Err(Error::EmptyStore);
        }
        if store.bounds() != config.bounds() {
            return Err(Error::invalid_config(
                "rating_min",
                format!(
                    "store bounds {:?} differ from configured bounds {:?}",
                    store.bounds(),
                    config.bounds()
                ),
            ));
        }
        assert_eq!(users.len(), store.user_count(), "user metadata misaligned");
        assert_eq!(items.len(), store.item_count(), "item metadata misaligned");

        let vocab_len = genres.len();
        let initial_items = |user: usize| {
            store
                .profile(user)
                .iter()
                .filter(|e| !initial_entries_only || e.origin == Origin::Initial)
                .map(|e| e.item)
                .collect::<Vec<_>>()
        };
        let initial_per_user: Vec<Option<GenreDistribution>> = (0..store.user_count())
            .map(|u| genre_distribution(initial_items(u), &items, vocab_len).ok())
            .collect();
        let all_initial: Vec<ItemIdx> = (0..store.user_count()).flat_map(initial_items).collect();
        let initial_population = genre_distribution(all_initial, &items, vocab_len).ok();

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::invalid_config("threads", e.to_string()))?;
        let rng = RngFactory::new(config.seed);

        Ok(Simulation {
            store,
            users,
            items,
            vocab_len,
            config,
            rng,
            initial_per_user,
            initial_population,
            pool,
            next_iteration,
        })
    }

    pub fn store(&self) -> &RatingStore {
        &self.store
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn next_iteration(&self) -> u32 {
        self.next_iteration
    }

    pub fn is_finished(&self) -> bool {
        self.next_iteration > self.config.iterations
    }

    pub fn into_store(self) -> RatingStore {
        self.store
    }

    /// Runs one iteration: split the data, fit the model, recommend to
    /// every user, draw selections, synthesize their ratings, commit all
    /// of them atomically and measure the iteration.
    pub fn step(&mut self) -> Result<IterationOutput> {
        let t = self.next_iteration;
        let config = &self.config;
        let m = self.store.user_count();
        let n = self.store.item_count();
        let hyper = config.hyper_params();

        let mut split_rng = self.rng.iteration_stream(t, StreamKind::Split);
        let split = split_train_test(&self.store, config.split_ratio, &mut split_rng)?;
        debug!(
            "iteration {t}: split {} train / {} test",
            split.train.len(),
            split.test.len()
        );

        let mut fit_rng = self.rng.iteration_stream(t, StreamKind::Fit);
        let model = fit(config.algorithm, &split.train, &hyper, &mut fit_rng)?;

        let store = &self.store;
        let exclusion_store = match config.exclusion {
            ExclusionMode::TrainProfile => &split.train,
            ExclusionMode::FullProfile => store,
        };
        let lists = self.pool.install(|| {
            (0..m)
                .into_par_iter()
                .map(|u| model.recommend(u, config.list_length, exclusion_store.profile(u)))
                .collect::<Vec<_>>()
        });
        let users_recommended = lists.iter().filter(|l| !l.is_empty()).count();
        let users_skipped = m - users_recommended;

        // Measurements over R^t and D^t, before any profile update.
        let table = PopularityTable::from_store(&self.store)?;
        let avg_pop_data = average_data_popularity(&self.store)?;
        let avg_pop_rec = average_recommendation_popularity(&lists, &table);
        let agg_div = aggregate_diversity(&lists, n);
        let theta = avg_pop_rec.map(|rec| compute_theta(rec, avg_pop_data));

        let drift_all = self.mean_taste_drift();
        let drift_m = group_mean_taste_drift(
            &self.store,
            &self.users,
            MALE_GROUP,
            &self.items,
            self.vocab_len,
            &self.initial_per_user,
            config.kld_epsilon,
        );
        let drift_f = group_mean_taste_drift(
            &self.store,
            &self.users,
            FEMALE_GROUP,
            &self.items,
            self.vocab_len,
            &self.initial_per_user,
            config.kld_epsilon,
        );
        let kld_mf = group_divergence(
            &self.store,
            &self.users,
            &self.items,
            self.vocab_len,
            MALE_GROUP,
            FEMALE_GROUP,
            config.kld_epsilon,
        );
        let population = self.initial_population.as_ref();
        let kld_pop = |group: &str| {
            population.and_then(|g| {
                group_population_divergence(
                    g,
                    &self.store,
                    &self.users,
                    group,
                    &self.items,
                    self.vocab_len,
                    config.kld_epsilon,
                )
            })
        };
        let kld_pop_m = kld_pop(MALE_GROUP);
        let kld_pop_f = kld_pop(FEMALE_GROUP);

        // Selection draws, one independent stream pair per user.
        let alpha = config.alpha;
        let per_user = config.selections_per_user;
        let rng = &self.rng;
        let staged: Vec<Vec<StagedSelection>> = self.pool.install(|| {
            lists
                .par_iter()
                .enumerate()
                .map(|(u, list)| {
                    if list.is_empty() {
                        return Vec::new();
                    }
                    let Some(user_mean) = store.user_mean(u) else {
                        return Vec::new();
                    };
                    let user_sd = store.user_sd(u).expect("mean implies sd");
                    let dist = acceptance_probabilities(list, alpha).expect("list is non-empty");
                    let mut select_rng = rng.user_stream(t, StreamKind::Selection, u);
                    let mut noise_rng = rng.user_stream(t, StreamKind::Noise, u);
                    dist.sample_without_replacement(per_user, &mut select_rng)
                        .into_iter()
                        .map(|(item, rank)| {
                            if store.has_rating(u, item) {
                                // The drawn item was held out of training
                                // but already sits in the profile; nothing
                                // is added for this draw.
                                return StagedSelection {
                                    item,
                                    rank,
                                    omega: None,
                                    rating: None,
                                    accepted: false,
                                };
                            }
                            let item_mean = store
                                .item_mean(item)
                                .or_else(|| store.global_mean())
                                .expect("store is non-empty");
                            let (omega, rating) = synthesize_rating(
                                user_mean,
                                user_sd,
                                item_mean,
                                store.bounds(),
                                &mut noise_rng,
                            );
                            StagedSelection {
                                item,
                                rank,
                                omega: Some(omega),
                                rating: Some(rating),
                                accepted: true,
                            }
                        })
                        .collect()
                })
                .collect()
        });

        // Single-writer commit, user index order.
        let mut committed = 0u64;
        let mut rejected = 0u64;
        let mut selection_pop_sum = 0.0;
        let mut events = Vec::new();
        for (u, selections) in staged.iter().enumerate() {
            for sel in selections {
                if sel.accepted {
                    self.store.insert(
                        u,
                        sel.item,
                        sel.rating.expect("accepted"),
                        Origin::Iteration(t),
                    )?;
                    committed += 1;
                    selection_pop_sum += table.phi(sel.item);
                } else {
                    rejected += 1;
                    debug!(
                        "iteration {t}: user {} drew already-rated item {}",
                        self.store.user_id(u),
                        self.store.item_id(sel.item)
                    );
                }
                events.push(SelectionEvent {
                    iteration: t,
                    user_id: self.store.user_id(u),
                    item_id: self.store.item_id(sel.item),
                    rank: sel.rank,
                    omega: sel.omega,
                    rating: sel.rating,
                    accepted: sel.accepted,
                });
            }
        }

        // Post-commit popularity, still measured against this iteration's
        // (frozen) table.
        let next_data_pop_frozen = self
            .store
            .item_counts()
            .iter()
            .enumerate()
            .map(|(item, &count)| count as f64 * table.phi(item))
            .sum::<f64>()
            / self.store.len() as f64;
        let selection_pop = (committed > 0).then(|| selection_pop_sum / committed as f64);

        let report = IterationReport {
            iteration: t,
            algorithm: config.algorithm,
            users_recommended,
            users_skipped,
            committed,
            rejected,
            data_size: table.interactions(),
            test_ratings: split.test.len(),
            avg_pop_data,
            avg_pop_rec,
            agg_div,
            theta_abs: theta.map(|t| t.absolute),
            theta_rel: theta.map(|t| t.relative),
            drift_all,
            drift_m,
            drift_f,
            kld_mf,
            kld_pop_m,
            kld_pop_f,
            selection_pop,
            next_data_pop_frozen,
        };
        info!(
            "iteration {t}: committed {committed}, avg_pop_rec {:?}, agg_div {:.4}",
            report.avg_pop_rec, report.agg_div
        );

        self.next_iteration += 1;
        Ok(IterationOutput { report, events })
    }

    /// Mean deviation of every user's current genre distribution from
    /// their frozen initial one.
    fn mean_taste_drift(&self) -> Option<f64> {
        let epsilon = self.config.kld_epsilon;
        let current: Vec<Option<GenreDistribution>> = self.pool.install(|| {
            (0..self.store.user_count())
                .into_par_iter()
                .map(|u| {
                    genre_distribution(
                        self.store.profile(u).iter().map(|e| e.item),
                        &self.items,
                        self.vocab_len,
                    )
                    .ok()
                })
                .collect()
        });
        let mut sum = 0.0;
        let mut count = 0usize;
        for (initial, now) in self.initial_per_user.iter().zip(&current) {
            let (Some(initial), Some(now)) = (initial, now) else {
                continue;
            };
            sum += kl_divergence(initial, now, epsilon).expect("same vocabulary");
            count += 1;
        }
        (count > 0).then(|| sum / count as f64)
    }
}

/// Applies [`Simulation::step`] `config.iterations` times.
pub fn run_simulation(data: Dataset, config: SimulationConfig) -> Result<SimulationRun> {
    let mut sim = Simulation::new(data, config)?;
    let mut reports = Vec::with_capacity(sim.config.iterations as usize);
    while !sim.is_finished() {
        let output = sim.step()?;
        reports.push(output.report);
    }
    Ok(SimulationRun {
        reports,
        store: sim.into_store(),
    })
}
