//! Truncated non-uniqueness construction: bound table at N = 24 and the
//! degeneration of the uniqueness certificates as N grows.

use lebesgue_toolkit::lebesgue::is_unique;
use lebesgue_toolkit::nonuniq::{bound_report, TruncationLab};

fn main() -> lebesgue_toolkit::error::Result<()> {
    let lab = TruncationLab::build(24)?;
    println!(
        "{:>2} {:>12} {:>12} {:>12} {:>8} {:>12} {:>12}",
        "n", "p(a*a)", "g(a*a)", "bound", "ratio", "||a_n||", "kadison"
    );
    for row in bound_report(&lab)?.iter().take(8) {
        println!(
            "{:>2} {:>12.9} {:>12.4e} {:>12.4e} {:>8.4} {:>12.4} {:>12.4}",
            row.n,
            row.p_an,
            row.g_an,
            row.paper_bound,
            row.ratio(),
            row.norm_an,
            row.norm_bound
        );
    }

    println!();
    println!(
        "{:>3} {:>14} {:>14} {:>8}",
        "N", "alpha_min", "lambda_max", "unique"
    );
    for level in [6, 12, 24, 40] {
        let lab = TruncationLab::build(level)?;
        let (unique, _) = is_unique(&lab.h()?, &lab.g, &lab.tolerances)?;
        println!(
            "{:>3} {:>14.6e} {:>14.6e} {:>8}",
            level,
            lab.alpha_min()?,
            lab.lambda_max()?,
            unique
        );
    }
    Ok(())
}
