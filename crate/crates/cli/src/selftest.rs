//! Fast invariant suite behind `wbc selftest`.

use crate::error::{CliError, CliResult};
use std::time::Instant;
use wbc_core::becbsc::{secrecy_corner, BecBscParams};
use wbc_core::ordering::{check_degraded, check_less_noisy, check_more_capable, Holds, Witness};
use wbc_core::probcore::{cascade, ck_identity_check, h2, Axis, Dmc, JointPmf};
use wbc_core::rng::{dirichlet, rng_for};

type Check = (&'static str, fn() -> Result<(), String>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_joint(sizes: &[usize], seed: u64) -> JointPmf {
    let axes: Vec<Axis> = sizes.iter().enumerate().map(|(i, &s)| Axis::new(format!("A{i}"), s)).collect();
    let n: usize = sizes.iter().product();
    let table = dirichlet(&mut rng_for(seed, 0), n, 1.0);
    JointPmf::new(axes, table).expect("dirichlet draw is a pmf")
}

fn random_channel(seed: u64, rows: usize, cols: usize) -> Dmc {
    let mut rng = rng_for(seed, 1);
    Dmc::new((0..rows).map(|_| dirichlet(&mut rng, cols, 1.0)).collect()).expect("rows are pmfs")
}

fn entropy_convention() -> Result<(), String> {
    let z = h2(0.0);
    ensure(z == 0.0 && z.is_sign_positive() && h2(1.0) == 0.0, || format!("h2(0) = {z:?}"))?;
    ensure((h2(0.5) - 1.0).abs() < 1e-15, || format!("h2(0.5) = {}", h2(0.5)))
}

fn chain_rule() -> Result<(), String> {
    for seed in 0..10 {
        let j = random_joint(&[2, 3, 2], seed);
        let f = |r: wbc_core::Result<f64>| r.map_err(|e| e.to_string());
        let joint = f(j.entropy_of(&["A0", "A1", "A2"]))?;
        let split = f(j.entropy_of(&["A0"]))? + f(j.conditional_entropy(&["A1", "A2"], &["A0"]))?;
        ensure((joint - split).abs() < 1e-12, || format!("seed {seed}: H(ABC) = {joint}, H(A) + H(BC|A) = {split}"))?;
        let ab = f(j.mutual_information(&["A0"], &["A1"]))?;
        let ba = f(j.mutual_information(&["A1"], &["A0"]))?;
        ensure((ab - ba).abs() < 1e-12 && ab >= -1e-12, || format!("seed {seed}: I(A;B) = {ab}, I(B;A) = {ba}"))?;
    }
    Ok(())
}

fn ck_identity() -> Result<(), String> {
    for (seed, n) in [(1, 2), (2, 2), (3, 3), (4, 3)] {
        let mut axes: Vec<Axis> = (1..=n).map(|i| Axis::new(format!("X{i}"), 2)).collect();
        axes.extend((1..=n).map(|i| Axis::new(format!("Y{i}"), 2)));
        axes.push(Axis::new("C", 2));
        let size = 1 << (2 * n + 1);
        let j = JointPmf::new(axes, dirichlet(&mut rng_for(seed, 0), size, 1.0)).map_err(|e| e.to_string())?;
        let d = ck_identity_check(&j).map_err(|e| e.to_string())?;
        ensure(d <= 1e-10, || format!("n = {n}: defect {d:e}"))?;
    }
    Ok(())
}

fn becbsc_endpoints() -> Result<(), String> {
    let p = BecBscParams::new(0.2, 0.1, 0.25).map_err(|e| e.to_string())?;
    let (a1, a2) = secrecy_corner(&p, 0.0);
    let (b1, b2) = secrecy_corner(&p, 0.5);
    ensure(a1.abs() < 1e-6 && (a2 - 0.342282).abs() < 1e-6, || format!("x = 0 gives ({a1}, {a2})"))?;
    ensure((b1 - 0.611278).abs() < 1e-6 && b2.abs() < 1e-6, || format!("x = 0.5 gives ({b1}, {b2})"))
}

fn degraded_witness() -> Result<(), String> {
    let bsc = |p: f64| wbc_core::probcore::make_bsc(p).expect("valid crossover");
    let r = check_degraded(&bsc(0.1), &bsc(0.25), 1e-7).map_err(|e| e.to_string())?;
    match (r.holds, r.witness) {
        (Holds::Proved, Some(Witness::Kernel(q))) => {
            ensure((q.prob(0, 1) - 0.1875).abs() < 1e-6, || format!("witness crossover {}", q.prob(0, 1)))
        }
        (h, _) => Err(format!("degradedness {h:?}")),
    }
}

fn ordering_hierarchy() -> Result<(), String> {
    for seed in 0..8 {
        let w = random_channel(seed, 3, 3);
        let q = random_channel(seed + 100, 3, 2);
        let weak = cascade(&w, &q).map_err(|e| e.to_string())?;
        let e = |r: wbc_core::Result<wbc_core::ordering::OrderingReport>| r.map_err(|e| e.to_string());
        let d = e(check_degraded(&w, &weak, 1e-7))?;
        let l = e(check_less_noisy(&w, &weak, 200, seed))?;
        let m = e(check_more_capable(&w, &weak, 16, seed))?;
        ensure(d.holds == Holds::Proved, || format!("seed {seed}: cascade not recognised as degraded"))?;
        ensure(l.holds != Holds::Refuted, || format!("seed {seed}: degraded but less-noisy refuted"))?;
        ensure(m.holds != Holds::Refuted, || format!("seed {seed}: degraded but more-capable refuted"))?;
    }
    Ok(())
}

const CHECKS: [Check; 6] = [
    ("entropy_convention", entropy_convention),
    ("chain_rule", chain_rule),
    ("ck_identity", ck_identity),
    ("becbsc_endpoints", becbsc_endpoints),
    ("degraded_witness", degraded_witness),
    ("ordering_hierarchy", ordering_hierarchy),
];

pub fn run() -> CliResult<()> {
    let start = Instant::now();
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed.push(name);
            }
        }
    }
    println!("{} of {} checks passed in {:.2?}", CHECKS.len() - failed.len(), CHECKS.len(), start.elapsed());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("selftest failed: {}", failed.join(", "))))
    }
}
