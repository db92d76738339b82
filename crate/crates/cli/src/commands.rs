use crate::error::{CliError, CliResult};
use crate::io::{csv_text, emit, fmt_num, json_text, load_channel, read_text, with_suffix, Manifest};
use crate::{BecAction, BecBscArgs, BoundArg, OrderingArgs, Pair, RegionArgs, SimulateArgs};
use serde_json::json;
use wbc_core::becbsc::{figure7_data, secrecy_curve, standard_curve, verify_convexity, verify_series, BecBscParams};
use wbc_core::ordering::{check_degraded, check_less_noisy, check_more_capable, Holds, OrderingReport, Witness};
use wbc_core::probcore::{Dmc, WiretapBc};
use wbc_core::regions::{
    capacity_degraded, capacity_deterministic, capacity_less_noisy, capacity_semidet, search_region, AuxSpec, Bound,
    RateRegion,
};
use wbc_core::sim::{run, SimConfig, SimResult};
use wbc_core::Error as CoreError;

fn verdict(r: &OrderingReport) -> String {
    let base = match r.holds {
        Holds::Proved => "proved",
        Holds::Refuted => "refuted",
        Holds::Undetermined => "undetermined",
    };
    if r.sampled && r.holds != Holds::Refuted {
        format!("{base} (sampled)")
    } else {
        base.to_string()
    }
}

pub fn ordering(a: OrderingArgs) -> CliResult<()> {
    let ch = load_channel(&a.channel)?;
    let (strong, weak, names) = match a.pair {
        Pair::Y1z => (&ch.ch_y1, &ch.ch_z, ["y1", "z"]),
        Pair::Y2z => (&ch.ch_y2, &ch.ch_z, ["y2", "z"]),
        Pair::Y1y2 => (&ch.ch_y1, &ch.ch_y2, ["y1", "y2"]),
    };
    let degraded = check_degraded(strong, weak, a.tol)?;
    let less_noisy = check_less_noisy(strong, weak, a.samples, a.seed)?;
    let more_capable = check_more_capable(strong, weak, a.grid, a.seed)?;

    println!("pair: {} over {}", names[0], names[1]);
    println!("degraded: {}", verdict(&degraded));
    if let Some(Witness::Kernel(q)) = &degraded.witness {
        if degraded.holds == Holds::Proved {
            if Dmc::identity(q.input_size()).is_ok_and(|id| &id == q) {
                println!("witness: identity");
            } else {
                let rows: Vec<String> =
                    q.rows().iter().map(|r| r.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(" ")).collect();
                println!("witness: [{}]", rows.join("; "));
            }
        }
    }
    println!("less_noisy: {}", verdict(&less_noisy));
    println!("more_capable: {}", verdict(&more_capable));

    if let Some(out) = a.out.as_deref() {
        let report = json!({
            "strong": names[0],
            "weak": names[1],
            "degraded": degraded,
            "less_noisy": less_noisy,
            "more_capable": more_capable,
        });
        let params = json!({
            "channel": a.channel, "pair": a.pair, "samples": a.samples, "grid": a.grid, "tol": a.tol,
        });
        emit(Some(out), &json_text(&report)?, &Manifest::new("ordering", params, Some(a.seed)))?;
    }
    Ok(())
}

/// Tries each capacity theorem in turn and returns the first whose premises hold.
fn capacity_auto(ch: &WiretapBc, aux: &AuxSpec, a: &RegionArgs) -> CliResult<(RateRegion, &'static str)> {
    type Attempt<'a> = (&'static str, Box<dyn Fn() -> wbc_core::Result<RateRegion> + 'a>);
    let attempts: [Attempt; 4] = [
        ("deterministic", Box::new(|| capacity_deterministic(ch, a.grid))),
        ("semi-deterministic", Box::new(|| capacity_semidet(ch, aux, a.budget, a.seed))),
        ("degraded", Box::new(|| capacity_degraded(ch, aux, a.budget, a.seed))),
        ("less-noisy", Box::new(|| capacity_less_noisy(ch, aux, a.budget, a.seed))),
    ];
    let mut failed = Vec::new();
    for (name, f) in attempts {
        match f() {
            Ok(r) => return Ok((r, name)),
            Err(e @ (CoreError::Premise(_) | CoreError::NotDeterministic(_))) => failed.push(format!("{name}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    Err(CoreError::Premise(format!("no capacity theorem applies; {}", failed.join("; "))).into())
}

pub fn region(a: RegionArgs) -> CliResult<()> {
    let ch = load_channel(&a.channel)?;
    let aux = AuxSpec::parse(&a.cards).map_err(|e| CliError::Parse(e.to_string()))?;
    let (region, evaluator) = match a.bound {
        BoundArg::Inner => (search_region(&ch, &aux, Bound::Inner, a.budget, a.seed)?, "inner"),
        BoundArg::OuterCor => (search_region(&ch, &aux, Bound::OuterCor, a.budget, a.seed)?, "outer-cor"),
        BoundArg::OuterThm1 => (search_region(&ch, &aux, Bound::OuterThm1, a.budget, a.seed)?, "outer-thm1"),
        BoundArg::CapacityAuto => capacity_auto(&ch, &aux, &a)?,
    };
    eprintln!("evaluator: {evaluator}");
    let rows: Vec<Vec<String>> =
        region.hull().iter().enumerate().map(|(i, p)| vec![fmt_num(p.r1), fmt_num(p.r2), i.to_string()]).collect();
    let params = json!({
        "channel": a.channel, "bound": a.bound, "cards": aux.cards(), "budget": a.budget,
        "grid": a.grid, "evaluator": evaluator,
    });
    emit(
        a.out.as_deref(),
        &csv_text(&["r1_bits", "r2_bits", "vertex_index"], &rows)?,
        &Manifest::new("region", params, Some(a.seed)),
    )
}

pub fn becbsc(a: BecBscArgs) -> CliResult<()> {
    let mut params = json!({ "e": a.e, "p2": a.p2, "p": a.p, "points": a.points });
    let (name, payload) = match &a.action {
        BecAction::Curve => {
            let bp = BecBscParams::new(a.e, a.p2, a.p)?;
            let sec = secrecy_curve(&bp, a.points)?;
            let std = standard_curve(a.e, a.p2, a.points)?;
            let rows = sec
                .iter()
                .zip(&std)
                .map(|(s, t)| vec![fmt_num(s.x), fmt_num(s.r1), fmt_num(s.r2), fmt_num(t.r1), fmt_num(t.r2)])
                .collect::<Vec<_>>();
            ("curve", csv_text(&["x", "r1_secrecy", "r2_secrecy", "r1_std", "r2_std"], &rows)?)
        }
        BecAction::Standard => {
            let rows = standard_curve(a.e, a.p2, a.points)?
                .iter()
                .map(|t| vec![fmt_num(t.x), fmt_num(t.r1), fmt_num(t.r2)])
                .collect::<Vec<_>>();
            ("standard", csv_text(&["x", "r1_std", "r2_std"], &rows)?)
        }
        BecAction::Figure7 { p_min, p_max, p_steps } => {
            params["p_min"] = json!(p_min);
            params["p_max"] = json!(p_max);
            params["p_steps"] = json!(p_steps);
            let mut rows = Vec::new();
            for b in figure7_data(a.p2, *p_min, *p_max, *p_steps, a.points)? {
                for (s, t) in b.secrecy.iter().zip(&b.standard) {
                    rows.push(vec![
                        fmt_num(b.p),
                        fmt_num(b.e),
                        b.admissibility.admissible.to_string(),
                        fmt_num(s.x),
                        fmt_num(s.r1),
                        fmt_num(s.r2),
                        fmt_num(t.r1),
                        fmt_num(t.r2),
                    ]);
                }
            }
            let header = ["p", "e", "admissible", "x", "r1_secrecy", "r2_secrecy", "r1_std", "r2_std"];
            ("figure7", csv_text(&header, &rows)?)
        }
        BecAction::VerifyConvexity { grid } => {
            params["grid"] = json!(grid);
            let report = verify_convexity(&BecBscParams::new(a.e, a.p2, a.p)?, *grid)?;
            eprintln!("{}", if report.passes { "convexity holds" } else { "convexity violated" });
            ("verify-convexity", json_text(&report)?)
        }
        BecAction::VerifySeries { k_max, a: sa, a2 } => {
            let (sa, a2) = (sa.unwrap_or(1.0 - 2.0 * a.p), a2.unwrap_or(1.0 - 2.0 * a.p2));
            params["k_max"] = json!(k_max);
            params["a"] = json!(sa);
            params["a2"] = json!(a2);
            let report = verify_series(sa, a2, a.e, *k_max)?;
            let summary = if report.all_pass { "all claims pass" } else { "some claims fail" };
            eprintln!("{summary}");
            let mut v = serde_json::to_value(&report).map_err(|e| CliError::Failed(e.to_string()))?;
            v["summary"] = json!(summary);
            ("verify-series", json_text(&v)?)
        }
    };
    emit(a.out.as_deref(), &payload, &Manifest::new(&format!("becbsc {name}"), params, None))
}

fn trial_rows(r: &SimResult) -> Vec<Vec<String>> {
    r.log
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                r.n.to_string(),
                i.to_string(),
                t.message[0].to_string(),
                t.message[1].to_string(),
                t.message[2].to_string(),
                t.covered.to_string(),
                t.ok[0].to_string(),
                t.ok[1].to_string(),
            ]
        })
        .collect()
}

fn sweep_row(r: &SimResult) -> Vec<String> {
    let l = r.leakage;
    let lay = &r.layout;
    vec![
        r.n.to_string(),
        fmt_num(lay.realized_t[0]),
        fmt_num(lay.realized_t[1]),
        fmt_num(lay.realized_t[2]),
        fmt_num(lay.realized_rbar[1]),
        fmt_num(lay.realized_rbar[2]),
        fmt_num(r.pe1.rate),
        fmt_num(r.pe1.lower),
        fmt_num(r.pe1.upper),
        fmt_num(r.pe2.rate),
        fmt_num(r.pe2.lower),
        fmt_num(r.pe2.upper),
        fmt_num(r.enc_fail_rate),
        l.map_or(String::new(), |l| fmt_num(l.rate)),
        l.map_or(String::new(), |l| fmt_num(l.stderr)),
    ]
}

pub fn parse_config(text: &str) -> CliResult<SimConfig> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("sim config: {e}")))
}

pub fn simulate(a: SimulateArgs) -> CliResult<()> {
    let cfg = parse_config(&read_text(&a.config)?)?;
    let ns = if a.sweep_n.is_empty() { vec![cfg.n] } else { a.sweep_n.clone() };
    let results = ns
        .iter()
        .map(|&n| {
            let mut c = cfg.clone();
            c.n = n;
            // validate every blocklength before running any of them
            c.layout().map(|_| c)
        })
        .collect::<wbc_core::Result<Vec<_>>>()?
        .iter()
        .map(run)
        .collect::<wbc_core::Result<Vec<_>>>()?;
    let params = json!({ "config": a.config, "sweep_n": a.sweep_n, "resolved": cfg });
    let manifest = Manifest::new("simulate", params, Some(cfg.seed));
    let payload = if a.sweep_n.is_empty() { json_text(&results[0])? } else { json_text(&results)? };
    emit(a.out.as_deref(), &payload, &manifest)?;
    if let Some(out) = a.out.as_deref() {
        let header = ["n", "trial", "w0", "w1", "w2", "covered", "ok1", "ok2"];
        let rows: Vec<Vec<String>> = results.iter().flat_map(trial_rows).collect();
        emit(Some(&with_suffix(out, ".trials.csv")), &csv_text(&header, &rows)?, &manifest)?;
        if !a.sweep_n.is_empty() {
            let header = [
                "n",
                "t0",
                "t1",
                "t2",
                "r1",
                "r2",
                "pe1",
                "pe1_lower",
                "pe1_upper",
                "pe2",
                "pe2_lower",
                "pe2_upper",
                "enc_fail_rate",
                "leakage_rate",
                "leakage_stderr",
            ];
            let rows: Vec<Vec<String>> = results.iter().map(sweep_row).collect();
            emit(Some(&with_suffix(out, ".sweep.csv")), &csv_text(&header, &rows)?, &manifest)?;
        }
    }
    Ok(())
}
