//! Thread-parallel drivers over the core routines. Results do not depend on
//! the number of threads.

use ehbal_core::epsilon::{epsilon_eval, epsilon_eval_in, EpsilonProfile, EpsilonValue};
use ehbal_core::moments::{degree_log_radial, MonomialNormTable};
use ehbal_core::obstruction::{assemble_report, f_log, scan_grid, ObstructionReport};
use ehbal_core::Error;
use rayon::prelude::*;

use crate::error::Result;

/// Norm table for degrees m..=dmax, one radial moment per degree in parallel.
pub fn build_table(m: u32, dmax: u32) -> Result<MonomialNormTable> {
    let mut table = MonomialNormTable::empty(m)?;
    if dmax < m {
        return Err(Error::Domain { op: "moments::build_table", reason: "max_degree must be >= m" }.into());
    }
    let rows = (m..=dmax)
        .into_par_iter()
        .map(|d| degree_log_radial(m, d))
        .collect::<Vec<_>>();
    for row in rows {
        let (l, method) = row?;
        table.push_degree(l, method);
    }
    Ok(table)
}

/// ε over `points`. The point farthest from the origin is evaluated first
/// and grows the table; the rest read the table concurrently.
pub fn epsilon_profile(
    m: u32,
    points: &[(f64, f64)],
    tol: f64,
    dmax: u32,
    table: &mut MonomialNormTable,
) -> Result<EpsilonProfile> {
    if let Some(&(x, y)) = points.iter().max_by(|a, b| (a.0 + a.1).total_cmp(&(b.0 + b.1))) {
        epsilon_eval(m, x, y, tol, dmax, table)?;
    }
    let first: Vec<ehbal_core::Result<EpsilonValue>> =
        points.par_iter().map(|&(x, y)| epsilon_eval_in(table, x, y, tol)).collect();
    let mut values = Vec::with_capacity(points.len());
    for (r, &(x, y)) in first.into_iter().zip(points) {
        let v = match r {
            Err(Error::NonConvergence { .. }) => epsilon_eval(m, x, y, tol, dmax, table)?,
            other => other?,
        };
        values.push(v);
    }
    Ok(EpsilonProfile::from_values(m, points, &values))
}

/// `obstruction::scan_f` with the samples evaluated in parallel.
pub fn scan_f(x_min: f64, x_max: f64, step: f64) -> Result<ObstructionReport> {
    let xs = scan_grid(x_min, x_max, step)?;
    let evaluated = xs.into_par_iter().map(|x| (x, f_log(x))).collect();
    Ok(assemble_report(x_min, x_max, step, evaluated)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ehbal_core::epsilon;
    use ehbal_core::moments;
    use ehbal_core::obstruction;

    #[test]
    fn table_matches_sequential() {
        assert_eq!(build_table(3, 12).unwrap(), moments::build_table(3, 12).unwrap());
        assert!(build_table(3, 2).is_err());
    }

    #[test]
    fn profile_matches_sequential() {
        let pts: Vec<(f64, f64)> = (1..=12).map(|i| (0.3 * i as f64, 0.1 * i as f64)).collect();
        let mut t1 = MonomialNormTable::empty(2).unwrap();
        let mut t2 = MonomialNormTable::empty(2).unwrap();
        let a = epsilon_profile(2, &pts, 1e-12, 202, &mut t1).unwrap();
        let b = epsilon::epsilon_profile(2, &pts, 1e-12, 202, &mut t2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scan_matches_sequential() {
        assert_eq!(scan_f(0.0, 5.0, 0.1).unwrap(), obstruction::scan_f(0.0, 5.0, 0.1).unwrap());
    }
}
