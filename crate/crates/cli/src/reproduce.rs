//! Built-in benchmark reruns: each check compares a computed value with the
//! reference value under a fixed absolute tolerance.

use std::time::Instant;

use clap::ValueEnum;
use l2plus::bounds::solve_cell;
use l2plus::fixtures::{self, sec6_1_values, sec6_2_values};
use l2plus::linsys::hinf_norm;
use l2plus::StateSpace;
use serde::Serialize;

use super::{print_json, CmdResult, Failure};

/// Reference values carry four decimals.
const REFERENCE_TOL: f64 = 1e-2;
/// A single-input plant admits no multiplier: the filter-free bound is the H-infinity norm.
const SINGLE_INPUT_TOL: f64 = 1e-4;
const HINF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Target {
    #[value(name = "sec6-1")]
    Sec61,
    #[value(name = "sec6-2")]
    Sec62,
}

#[derive(Debug, Serialize)]
struct Check {
    quantity: String,
    computed: Option<f64>,
    reference: f64,
    tol: f64,
    pass: bool,
    seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn check(
    quantity: String,
    reference: f64,
    tol: f64,
    value: Result<f64, String>,
    seconds: f64,
) -> Check {
    Check {
        quantity,
        computed: value.as_ref().ok().copied(),
        reference,
        tol,
        pass: value.as_ref().is_ok_and(|v| (v - reference).abs() <= tol),
        seconds,
        error: value.err(),
    }
}

fn timed<T>(f: impl FnOnce() -> l2plus::Result<T>) -> (Result<T, String>, f64) {
    let start = Instant::now();
    let value = f().map_err(|e| e.to_string());
    (value, start.elapsed().as_secs_f64())
}

struct Reference {
    hinf: f64,
    filter_free: f64,
    best: f64,
    best_alpha: f64,
    best_degree: usize,
}

fn checks(ss: &StateSpace, p: &Reference) -> Vec<Check> {
    let (hinf, t_hinf) = timed(|| hinf_norm(ss, HINF_TOL));
    let (free, t_free) = timed(|| solve_cell(ss, p.best_alpha, 0).map(|c| c.gamma()));
    let (best, t_best) = timed(|| solve_cell(ss, p.best_alpha, p.best_degree).map(|c| c.gamma()));
    let mut out = vec![
        check("hinf".into(), p.hinf, REFERENCE_TOL, hinf.clone(), t_hinf),
        check(
            "bound N=0".into(),
            p.filter_free,
            REFERENCE_TOL,
            free.clone(),
            t_free,
        ),
    ];
    if ss.n_w() == 1 {
        let diff = match (&hinf, &free) {
            (Ok(h), Ok(g)) => Ok(g - h),
            _ => Err("needs both hinf and the N=0 bound".to_string()),
        };
        out.push(check(
            "bound N=0 minus hinf".into(),
            0.0,
            SINGLE_INPUT_TOL,
            diff,
            0.0,
        ));
    }
    out.push(check(
        format!("bound alpha={} N={}", p.best_alpha, p.best_degree),
        p.best,
        REFERENCE_TOL,
        best,
        t_best,
    ));
    out
}

pub(crate) fn run(target: Target, json: bool) -> CmdResult {
    let (name, ss, reference) = match target {
        Target::Sec61 => (
            "sec6-1",
            fixtures::sec6_1(),
            Reference {
                hinf: sec6_1_values::HINF,
                filter_free: sec6_1_values::FILTER_FREE_BOUND,
                best: sec6_1_values::BEST_BOUND,
                best_alpha: sec6_1_values::BEST_ALPHA,
                best_degree: sec6_1_values::BEST_DEGREE,
            },
        ),
        Target::Sec62 => (
            "sec6-2",
            fixtures::sec6_2(),
            Reference {
                hinf: sec6_2_values::HINF,
                filter_free: sec6_2_values::FILTER_FREE_BOUND,
                best: sec6_2_values::BEST_BOUND,
                best_alpha: sec6_2_values::BEST_ALPHA,
                best_degree: sec6_2_values::BEST_DEGREE,
            },
        ),
    };
    let rows = checks(&ss, &reference);
    let all_pass = rows.iter().all(|c| c.pass);
    if json {
        print_json(&rows)?;
    } else {
        println!("{name}");
        println!(
            "{:<24} {:>10} {:>10} {:>10} {:>6} {:>10}",
            "quantity", "computed", "reference", "tol", "result", "seconds"
        );
        for c in &rows {
            let computed = c.computed.map_or_else(|| "-".into(), |v| format!("{v:.6}"));
            println!(
                "{:<24} {:>10} {:>10.6} {:>10.6} {:>6} {:>10.6}",
                c.quantity,
                computed,
                c.reference,
                c.tol,
                if c.pass { "PASS" } else { "FAIL" },
                c.seconds
            );
            if let Some(e) = &c.error {
                println!("  error: {e}");
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Silent)
    }
}
