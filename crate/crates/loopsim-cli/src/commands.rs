//! The three commands: run a simulation from a config file, resume an
//! interrupted run from its manifest, and merge trajectory CSVs for
//! cross-algorithm plotting.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;

use loopsim::dataset::{load_movielens, Dataset};
use loopsim::feedback::{
    read_checkpoint, write_checkpoint, write_events, CheckpointHeader, Simulation,
};
use loopsim::report::CSV_HEADER;
use loopsim::{density, IterationReport};

use crate::config::{fingerprint_files, RunConfig};
use crate::manifest::{
    CheckpointRecord, RunManifest, CHECKPOINT_DIR, MANIFEST_FILE, SELECTIONS_FILE, TRAJECTORY_FILE,
};

/// Runs a full simulation, writing the trajectory CSV, the selections
/// log, the manifest and (optionally) per-iteration checkpoints.
pub fn cmd_run(config_path: &Path, out_dir: &Path, checkpoint_every: u32) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    for file in config.data_files() {
        if !file.exists() {
            bail!("dataset file not found: {}", file.display());
        }
    }
    let config_hash = config.config_hash();
    let fingerprint = fingerprint_files(&config.data_files())?;

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let data = load_dataset(&config)?;
    let mut manifest = RunManifest::new(config.clone(), config_hash, fingerprint, checkpoint_every);
    manifest.write(out_dir)?;

    let sim = Simulation::new(data, config.sim.clone())?;

    let csv_path = out_dir.join(TRAJECTORY_FILE);
    let mut csv = BufWriter::new(
        fs::File::create(&csv_path)
            .with_context(|| format!("cannot create {}", csv_path.display()))?,
    );
    writeln!(csv, "{CSV_HEADER}")?;
    let events_path = out_dir.join(SELECTIONS_FILE);
    let mut events = BufWriter::new(
        fs::File::create(&events_path)
            .with_context(|| format!("cannot create {}", events_path.display()))?,
    );

    drive(sim, &mut manifest, out_dir, &mut csv, &mut events)?;
    Ok(())
}

/// Continues an interrupted run to completion. The final outputs are
/// identical to an uninterrupted run with the same seed.
pub fn cmd_resume(manifest_path: &Path) -> Result<()> {
    let mut manifest = RunManifest::read(manifest_path)?;
    let out_dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));

    if manifest.completed {
        println!("run already complete, nothing to resume");
        return Ok(());
    }

    let recomputed_hash = manifest.config.config_hash();
    if recomputed_hash != manifest.config_hash {
        bail!(
            "config hash mismatch: manifest records {} but its embedded config hashes to {}; \
             refusing to resume an edited run",
            manifest.config_hash,
            recomputed_hash
        );
    }
    let Some(checkpoint) = manifest.latest_checkpoint().cloned() else {
        bail!("manifest lists no checkpoints; rerun from scratch instead");
    };

    let fingerprint = fingerprint_files(&manifest.config.data_files())?;
    if fingerprint != manifest.dataset_fingerprint {
        bail!(
            "dataset fingerprint mismatch: the data files changed since the run started; \
             refusing to resume"
        );
    }

    let checkpoint_path = out_dir.join(&checkpoint.path);
    let file = fs::File::open(&checkpoint_path)
        .with_context(|| format!("cannot open checkpoint {}", checkpoint_path.display()))?;
    let (header, snapshot_store) =
        read_checkpoint(std::io::BufReader::new(file), manifest.config.sim.bounds())?;
    if header.config_hash != manifest.config_hash {
        bail!(
            "checkpoint {} was produced under config hash {}, manifest says {}; refusing to resume",
            checkpoint_path.display(),
            header.config_hash,
            manifest.config_hash
        );
    }

    let mut data = load_dataset(&manifest.config)?;
    if data.store.user_ids() != snapshot_store.user_ids()
        || data.store.item_ids() != snapshot_store.item_ids()
    {
        bail!("checkpoint universe does not match the dataset; refusing to resume");
    }
    data.store = snapshot_store;

    let resume_from = header.iteration;
    let sim = Simulation::from_snapshot(data, manifest.config.sim.clone(), resume_from + 1)?;

    // Drop any rows past the checkpoint; they may postdate it.
    let csv_path = out_dir.join(&manifest.trajectory_csv);
    truncate_by_iteration(&csv_path, resume_from, true)?;
    let events_path = out_dir.join(&manifest.selections_log);
    truncate_by_iteration(&events_path, resume_from, false)?;

    let mut csv = BufWriter::new(
        fs::OpenOptions::new()
            .append(true)
            .open(&csv_path)
            .with_context(|| format!("cannot open {}", csv_path.display()))?,
    );
    let mut events = BufWriter::new(
        fs::OpenOptions::new()
            .append(true)
            .open(&events_path)
            .with_context(|| format!("cannot open {}", events_path.display()))?,
    );
    info!("resuming from iteration {}", resume_from + 1);
    drive(sim, &mut manifest, &out_dir, &mut csv, &mut events)?;
    Ok(())
}

/// Concatenates trajectory CSVs into one long-format file with a `run`
/// column holding each input's file stem.
pub fn cmd_compare(inputs: &[PathBuf], out: &Path) -> Result<()> {
    if inputs.is_empty() {
        bail!("compare needs at least one trajectory CSV");
    }
    let mut merged = String::new();
    merged.push_str("run,");
    merged.push_str(CSV_HEADER);
    merged.push('\n');
    for input in inputs {
        let text = fs::read_to_string(input)
            .with_context(|| format!("cannot read {}", input.display()))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(header) if header == CSV_HEADER => {}
            _ => bail!(
                "{}: header does not match the trajectory format",
                input.display()
            ),
        }
        let run_id = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string());
        for line in lines {
            if line.is_empty() {
                continue;
            }
            merged.push_str(&run_id);
            merged.push(',');
            merged.push_str(line);
            merged.push('\n');
        }
    }
    fs::write(out, merged).with_context(|| format!("cannot write {}", out.display()))?;
    Ok(())
}

fn load_dataset(config: &RunConfig) -> Result<Dataset> {
    let data = load_movielens(
        &config.ratings_file,
        &config.users_file,
        &config.movies_file,
        config.sim.bounds(),
    )?;
    let density_pct = density(&data.store).map(|d| d * 100.0).unwrap_or(0.0);
    info!(
        "loaded {} users, {} items, {} ratings, {} genres, density {:.3}%",
        data.store.user_count(),
        data.store.item_count(),
        data.store.len(),
        data.genres.len(),
        density_pct
    );
    Ok(data)
}

/// Steps the simulation to completion, appending rows, events and
/// checkpoints as it goes; rewrites the manifest after each checkpoint
/// and finally marks it complete.
fn drive(
    mut sim: Simulation,
    manifest: &mut RunManifest,
    out_dir: &Path,
    csv: &mut impl Write,
    events_out: &mut impl Write,
) -> Result<()> {
    while !sim.is_finished() {
        let t = sim.next_iteration();
        let output = sim.step()?;
        append_row(csv, &output.report)?;
        write_events(&output.events, events_out)?;
        events_out.flush()?;
        if manifest.checkpoint_every > 0 && t.is_multiple_of(manifest.checkpoint_every) {
            let record = save_checkpoint(sim.store(), manifest, out_dir, t, sim.config().seed)?;
            manifest.checkpoints.push(record);
            manifest.write(out_dir)?;
        }
    }
    manifest.mark_completed();
    manifest.write(out_dir)?;
    Ok(())
}

fn append_row(csv: &mut impl Write, report: &IterationReport) -> Result<()> {
    writeln!(csv, "{}", report.csv_row())?;
    csv.flush()?;
    Ok(())
}

fn save_checkpoint(
    store: &loopsim::RatingStore,
    manifest: &RunManifest,
    out_dir: &Path,
    iteration: u32,
    seed: u64,
) -> Result<CheckpointRecord> {
    let dir = out_dir.join(CHECKPOINT_DIR);
    fs::create_dir_all(&dir)?;
    let name = format!("ckpt_t{iteration:04}.txt");
    let final_path = dir.join(&name);
    let tmp_path = dir.join(format!("{name}.tmp"));
    {
        let mut w = BufWriter::new(fs::File::create(&tmp_path)?);
        let header = CheckpointHeader {
            iteration,
            config_hash: manifest.config_hash.clone(),
            master_seed: seed,
        };
        write_checkpoint(store, &header, &mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp_path, &final_path)?;
    Ok(CheckpointRecord {
        iteration,
        path: PathBuf::from(CHECKPOINT_DIR).join(name),
    })
}

/// Rewrites a line-oriented file keeping only rows whose leading integer
/// field is at most `max_iteration`.
fn truncate_by_iteration(path: &Path, max_iteration: u32, has_header: bool) -> Result<()> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut kept = String::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 && has_header {
            kept.push_str(line);
            kept.push('\n');
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let first = line.split([',', '\t']).next().unwrap_or("");
        match first.parse::<u32>() {
            Ok(t) if t <= max_iteration => {
                kept.push_str(line);
                kept.push('\n');
            }
            Ok(_) => {}
            Err(_) => bail!("{}: unparseable row {:?}", path.display(), line),
        }
    }
    fs::write(path, kept).with_context(|| format!("cannot rewrite {}", path.display()))?;
    Ok(())
}

/// Re-exported for integration tests that need to locate outputs.
pub fn output_paths(out_dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (
        out_dir.join(MANIFEST_FILE),
        out_dir.join(TRAJECTORY_FILE),
        out_dir.join(SELECTIONS_FILE),
    )
}
