//! Exact expected makespan of a chunked run and the optimal chunk count.

use ckptopt::exact::{expected_makespan_total, expected_tlost, expected_trec, optimal_chunks};
use ckptopt::model::{PlatformParams, WorkloadSpec, DAY};

fn main() -> ckptopt::Result<()> {
    let p = PlatformParams::latency(600.0, 600.0, 60.0, 1.0 / 20_000.0, 1.0 / 700.0);
    let wl = WorkloadSpec::new(DAY)?;

    println!("T_rec = {:.1} s", expected_trec(&p)?);
    println!("T_lost(W = 4h) = {:.1} s", expected_tlost(4.0 * 3600.0, &p)?);

    let sol = optimal_chunks(&wl, &p)?;
    println!(
        "n* = {:.3}, n_opt = {}, period = {:.0} s, E[makespan] = {:.0} s",
        sol.n_star_real, sol.n_opt, sol.period, sol.expected_makespan
    );

    for n in (sol.n_opt.saturating_sub(3).max(1))..=sol.n_opt + 3 {
        let m = expected_makespan_total(wl.total_work, n, &p)?;
        let mark = if n == sol.n_opt { " <-" } else { "" };
        println!("  n = {n:>3}  E[makespan] = {m:.0} s{mark}");
    }
    Ok(())
}
