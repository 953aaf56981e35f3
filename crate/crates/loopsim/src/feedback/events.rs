use std::io::Write;

/// One selection draw for one user in one iteration. `accepted` is false
/// only on the defensive branch where the drawn item already sat in the
/// user's profile; such draws carry no omega or rating and are not
/// committed.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionEvent {
    pub iteration: u32,
    pub user_id: u32,
    pub item_id: u32,
    /// 1-based rank the item held in the user's list when drawn.
    pub rank: usize,
    pub omega: Option<f64>,
    pub rating: Option<i32>,
    pub accepted: bool,
}

/// Writes committed selections as
/// `t<TAB>user<TAB>item<TAB>rank<TAB>omega<TAB>rating` lines.
pub fn write_events<W: Write>(events: &[SelectionEvent], w: &mut W) -> std::io::Result<()> {
    for ev in events {
        if !ev.accepted {
            continue;
        }
        let omega = ev.omega.expect("accepted event has omega");
        let rating = ev.rating.expect("accepted event has rating");
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            ev.iteration, ev.user_id, ev.item_id, ev.rank, omega, rating
        )?;
    }
    Ok(())
}
