use std::f64::consts::LN_2;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use expburgers::asymptotics::{
    check_decay_bound, run_pipeline, solve_balance, ExtrapolationReport, Sequence, TransformId,
};
use expburgers::exact::{evaluate_at_precision, precision_consistency, DEFAULT_TERM_CAP};
use expburgers::experiments::{
    fig3, magnitude_spectrum, reference_exact_symbol, reference_solver_config, solver_figures, Band, Fig1,
    Fig2, FIG1_HEADLINE, FIG2_HEADLINE, FIG3_HEADLINE, REFERENCE_EXACT_BITS, REFERENCE_EXACT_K,
};
use expburgers::solver::{run, InitialCondition};
use expburgers::{with_precision, DissipationSymbol, Real, Sequence64, SolverConfig64, SymbolFamily};

use crate::config::{ConfigError, RunConfig};
use crate::error::CliError;
use crate::input::{read_spectrum, SpectrumKind};
use crate::output::{flag, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

fn dec<T: Real>(x: &T) -> String {
    x.to_decimal()
}

fn symbol_json(sym: &DissipationSymbol) -> Value {
    json!({
        "family": sym.family.name(),
        "mu": sym.mu,
        "sigma": sym.sigma,
        "k_d": sym.k_d(),
        "alpha": sym.alpha,
    })
}

fn solver_json(cfg: &SolverConfig64) -> Value {
    let (num, den) = cfg.grid.dealias_fraction();
    let initial = match &cfg.initial_condition {
        InitialCondition::MinusSine => json!({"kind": "minus_sine"}),
        InitialCondition::SingleComplexMode(a) => {
            json!({"kind": "single_complex_mode", "amplitude_re": a.re, "amplitude_im": a.im})
        }
        InitialCondition::Custom(_) => json!({"kind": "custom"}),
    };
    json!({
        "grid": {
            "n_collocation": cfg.grid.n_collocation(),
            "dealias": format!("{num}/{den}"),
            "k_max": cfg.grid.k_max(),
        },
        "symbol": symbol_json(&cfg.symbol),
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "steps": cfg.n_steps().ok(),
        "initial_condition": initial,
        "product": format!("{:?}", cfg.product).to_lowercase(),
    })
}

/// Last noise-free wavenumber: the explicit band end, else one before the
/// detected onset, else the grid cutoff.
fn cutoff(band: Band, onset: Option<i64>, k_max: i64) -> i64 {
    band.k_max.unwrap_or_else(|| onset.map_or(k_max, |k| k - 1))
}

pub fn simulate(cfg: &RunConfig, out: &Outputs) -> Result<(), CliError> {
    out.reserve(&["spectrum.csv", "simulate.json"])?;
    let solver = cfg.solver(SymbolFamily::Cosh)?;
    let start = Instant::now();
    let field = run(&solver)?;
    let wall = start.elapsed().as_secs_f64();

    let k_max = solver.grid.k_max();
    let onset = field.noise_onset();
    let last_clean = cutoff(cfg.band(), onset, k_max);
    let rows: Vec<Vec<String>> = (0..=k_max)
        .map(|k| {
            let u = field.get(k);
            vec![
                k.to_string(),
                dec(&u.re),
                dec(&u.im),
                dec(&u.norm()),
                flag(k >= 1 && k > last_clean),
            ]
        })
        .collect();
    out.csv("spectrum.csv", &["k", "re_u", "im_u", "abs_u", "noise_flag"], &rows)?;

    let noise_free = (1..=last_clean.min(k_max)).count();
    let mut summary = solver_json(&solver);
    summary["noise_onset"] = json!(onset);
    summary["noise_free_modes"] = json!(noise_free);
    summary["spectrum_csv"] = json!("spectrum.csv");
    summary["wall_time_s"] = json!(wall);
    out.json("simulate.json", &summary)?;

    println!(
        "simulate: t = {}, {} noise-free modes, noise onset {}, {:.2} s",
        solver.t_end,
        noise_free,
        onset.map_or("none".to_string(), |k| k.to_string()),
        wall
    );
    Ok(())
}

/// Digits the low-precision coefficient must share with the re-check.
fn required_digits(bits: u32) -> f64 {
    0.5 * bits as f64 * std::f64::consts::LOG10_2
}

pub fn exact(cfg: &RunConfig, bits: Option<u32>, out: &Outputs) -> Result<(), CliError> {
    out.reserve(&["exact.csv", "exact.json"])?;
    let sym = cfg.symbol(SymbolFamily::Exponential)?;
    let bits = bits.unwrap_or(cfg.precision_bits);
    let check_bits = if cfg.check_precision_bits > bits {
        cfg.check_precision_bits
    } else {
        bits + bits / 2
    };
    let k_max = cfg.k_exact_max;
    let t = cfg.t_end;

    let start = Instant::now();
    let (values, counts) = evaluate_at_precision(k_max, &sym, t, bits, cfg.term_cap)?;
    let rows: Vec<Vec<String>> = values
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(i, (v, n))| vec![(i + 1).to_string(), dec(v), n.to_string(), bits.to_string()])
        .collect();
    out.csv("exact.csv", &["k", "vhat", "terms", "precision_bits"], &rows)?;

    let check = precision_consistency(k_max, &sym, t, &values[k_max - 1], bits, check_bits, cfg.term_cap)?;
    let required = required_digits(bits);
    let summary = json!({
        "symbol": symbol_json(&sym),
        "t": t,
        "k_max": k_max,
        "precision_bits": bits,
        "term_cap": cfg.term_cap,
        "total_terms": counts.iter().sum::<usize>(),
        "check": {
            "k": check.k,
            "high_bits": check.high_bits,
            "high_value": dec(&check.high),
            "digits_agreed": check.digits_agreed,
            "required_digits": required,
            "passes": check.passes(required),
        },
        "coefficients_csv": "exact.csv",
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    out.json("exact.json", &summary)?;

    println!(
        "exact: v_hat(k, {t}) for k = 1..={k_max} at {bits} bits, {} terms; {}-bit re-check of k = {k_max}: {:.1} digits ({})",
        counts.iter().sum::<usize>(),
        check_bits,
        check.digits_agreed,
        if check.passes(required) { "ok" } else { "FAILED" }
    );
    if !check.passes(required) {
        eprintln!("warning: precision re-check agrees to fewer than {required:.1} digits; raise precision_bits");
    }
    Ok(())
}

fn report_json<T: Real>(r: &ExtrapolationReport<T>, input: &str, bits: Option<u32>) -> Value {
    let canonical = r.is_canonical();
    json!({
        "input": input,
        "precision_bits": bits,
        "stack": r.stack().iter().map(|t| t.name()).collect::<Vec<_>>(),
        "canonical": canonical,
        "terminal_fit": dec(&r.terminal_fit),
        "tail_len": r.tail_len,
        "c_star": r.c_star.as_ref().map(dec),
        "tail_discrepancy": canonical.then(|| dec(&r.tail_discrepancy())),
        "best": r.best_discrepancy().map(|(k, v)| json!({"k": k, "value": dec(&v)})),
        "stages": r.stages.iter().map(|(t, s)| json!({
            "transform": t.name(),
            "start_index": s.start_index,
            "values": s.values.iter().map(dec).collect::<Vec<_>>(),
            "noisy": s.noisy,
        })).collect::<Vec<_>>(),
    })
}

fn trace_table<T: Real>(r: &ExtrapolationReport<T>) -> ([&'static str; 4], Vec<Vec<String>>) {
    let header = if r.is_canonical() {
        ["k", "stage5", "stage5_plus_ln2", "noise_flag"]
    } else {
        ["k", "terminal", "terminal_minus_fit", "noise_flag"]
    };
    let rows = r
        .terminal()
        .iter()
        .zip(&r.discrepancy_trace.values)
        .zip(&r.terminal().noisy)
        .map(|(((k, v), d), &noisy)| vec![k.to_string(), dec(v), dec(d), flag(noisy)])
        .collect();
    (header, rows)
}

fn write_report<T: Real>(
    out: &Outputs,
    report: &ExtrapolationReport<T>,
    input: &str,
    bits: Option<u32>,
    json_name: &str,
    csv_name: &str,
) -> Result<(), CliError> {
    out.json(json_name, &report_json(report, input, bits))?;
    let (header, rows) = trace_table(report);
    out.csv(csv_name, &header, &rows)?;
    Ok(())
}

fn restrict<T: Real>(s: Sequence<T>, k_min: Option<i64>, k_max: Option<i64>) -> Sequence<T> {
    let lo = k_min.unwrap_or(s.start_index).max(s.start_index);
    let mut s = s.band(lo, s.end_index());
    if let Some(hi) = k_max {
        for (i, k) in (s.start_index..).take(s.len()).enumerate() {
            s.noisy[i] |= k > hi;
        }
    }
    s
}

pub fn parse_stack(spec: &str) -> Result<Vec<TransformId>, CliError> {
    let stack = TransformId::parse_stack(spec).map_err(|e| ConfigError::key("stack", e.to_string()))?;
    if stack.is_empty() {
        return Err(ConfigError::key("stack", "empty transform stack").into());
    }
    Ok(stack)
}

fn print_report<T: Real>(r: &ExtrapolationReport<T>) {
    let stack: Vec<_> = r.stack().iter().map(|t| t.name()).collect();
    print!("extrapolate: stack {}, terminal fit {:.6e} over {} entries", stack.join(","), r.terminal_fit.to_f64(), r.tail_len);
    if let Some(c) = &r.c_star {
        print!(", C* = {:.6}, tail discrepancy {:.4e}", c.to_f64(), r.tail_discrepancy().to_f64());
    }
    println!();
}

pub fn extrapolate(
    input: &Path,
    stack: &[TransformId],
    bits: Option<u32>,
    k_min: Option<i64>,
    k_max: Option<i64>,
    out: &Outputs,
) -> Result<(), CliError> {
    out.reserve(&["extrapolation.json", "trace.csv"])?;
    let file = read_spectrum(input)?;
    let label = input.display().to_string();
    match file.kind {
        SpectrumKind::Solver => {
            let s = restrict(file.to_f64(input)?, k_min, k_max);
            let report = run_pipeline(&s, stack)?;
            write_report(out, &report, &label, None, "extrapolation.json", "trace.csv")?;
            print_report(&report);
        }
        SpectrumKind::Exact { bits: recorded } => {
            let bits = bits.unwrap_or(recorded);
            let s = file.to_big(input, bits)?;
            with_precision(bits, || -> Result<(), CliError> {
                let s = restrict(s, k_min, k_max);
                let report = run_pipeline(&s, stack)?;
                write_report(out, &report, &label, Some(bits), "extrapolation.json", "trace.csv")?;
                print_report(&report);
                Ok(())
            })?;
        }
    }
    Ok(())
}

pub fn predict(cfg: &RunConfig, n_max: u32, f1: f64, out: &Outputs) -> Result<(), CliError> {
    out.reserve(&["prediction.csv", "prediction.json"])?;
    let sym = cfg.symbol(SymbolFamily::Exponential)?;
    let p = solve_balance(&sym, n_max, f1)?;
    let rows: Vec<Vec<String>> = p
        .f_values
        .iter()
        .map(|(&k, f)| vec![k.to_string(), dec(f), dec(&p.closed_form.eval(&sym, k as f64))])
        .collect();
    out.csv("prediction.csv", &["k", "f", "closed_form"], &rows)?;
    let summary = json!({
        "symbol": symbol_json(&sym),
        "n_max": n_max,
        "f1": f1,
        "closed_form": p.closed_form,
        "midpoint_minimum": p.midpoint_minimum,
    });
    out.json("prediction.json", &summary)?;
    let k = 1u64 << n_max;
    println!(
        "predict: F({k}) = {:.6e}, leading order {:.6e}, coefficient {}",
        p.f_values[&k],
        p.closed_form.eval(&sym, k as f64),
        p.closed_form.coefficient()
    );
    Ok(())
}

fn fig1_rows(f: &Fig1) -> Vec<Vec<String>> {
    f.discrepancy
        .iter()
        .zip(&f.discrepancy.noisy)
        .map(|((k, d), &noisy)| {
            let s = f.spectrum.get(k).copied().unwrap_or(f64::NAN);
            vec![k.to_string(), dec(&s), dec(d), dec(&(d * LN_2)), flag(noisy)]
        })
        .collect()
}

const FIG1_HEADER: [&str; 5] = ["k", "abs_u", "discr", "discr_relative", "noise_flag"];

pub struct DecayOptions {
    pub c: f64,
    pub k_min: i64,
}

pub fn discrepancy(
    cfg: &RunConfig,
    spectrum: Option<&Path>,
    decay: DecayOptions,
    out: &Outputs,
) -> Result<(), CliError> {
    out.reserve(&["discrepancy.csv", "discrepancy.json"])?;
    let sym = cfg.symbol(SymbolFamily::Cosh)?;
    let (s, onset, source): (Sequence64, Option<i64>, String) = match spectrum {
        Some(path) => {
            let file = read_spectrum(path)?;
            let s = restrict(file.to_f64(path)?, Some(cfg.report_k_min), cfg.report_k_max);
            let onset = s.iter().zip(&s.noisy).find(|(_, &n)| n).map(|((k, _), _)| k);
            (s, onset, path.display().to_string())
        }
        None => {
            let solver = cfg.solver(SymbolFamily::Cosh)?;
            let field = run(&solver)?;
            let s = magnitude_spectrum(&field, cfg.band());
            (s, field.noise_onset(), "solver".to_string())
        }
    };
    let f = Fig1::from_spectrum(s, sym.k_d(), cfg.t_end, onset)?;
    out.csv("discrepancy.csv", &FIG1_HEADER, &fig1_rows(&f))?;
    let check = check_decay_bound(&f.spectrum, sym.k_d(), decay.c, decay.k_min);
    let summary = json!({
        "source": source,
        "symbol": symbol_json(&sym),
        "t": cfg.t_end,
        "noise_onset": f.noise_onset,
        "min_relative": f.min_relative,
        "min_at": f.min_at,
        "decay_bound": {
            "c": decay.c,
            "k_min": decay.k_min,
            "holds": check.holds,
            "first_violation": check.first_violation,
            "checked": check.checked,
        },
    });
    out.json("discrepancy.json", &summary)?;
    println!(
        "discrepancy: min |Discr|/(1/ln 2) = {:.4} at k = {}; decay bound C = {} from k = {}: {}",
        f.min_relative,
        f.min_at,
        decay.c,
        decay.k_min,
        if check.holds { "holds".to_string() } else { format!("violated at k = {:?}", check.first_violation) }
    );
    Ok(())
}

pub fn reproduce(figure: Figure, bits: Option<u32>, report_k_max: Option<i64>, out: &Outputs) -> Result<(), CliError> {
    let band = Band {
        k_min: 1,
        k_max: report_k_max,
    };
    match figure {
        Figure::Fig1 => {
            out.reserve(&["fig1.csv", "fig1.json"])?;
            let figs = solver_figures(&reference_solver_config(), band)?;
            let f = &figs.fig1;
            out.csv("fig1.csv", &FIG1_HEADER, &fig1_rows(f))?;
            out.json(
                "fig1.json",
                &json!({
                    "quantity": "min |Discr(k)| ln 2 over the noise-free band",
                    "headline": FIG1_HEADLINE,
                    "computed": f.min_relative,
                    "at_k": f.min_at,
                    "noise_onset": f.noise_onset,
                    "report_k_max": report_k_max,
                }),
            )?;
            println!(
                "fig1: min |Discr|/(1/ln 2)  headline {FIG1_HEADLINE}  computed {:.4} (k = {})",
                f.min_relative, f.min_at
            );
            println!(
                "fig1: noise onset  headline 17  computed {}",
                f.noise_onset.map_or("none".to_string(), |k| k.to_string())
            );
        }
        Figure::Fig2 => {
            out.reserve(&["fig2.csv", "fig2.json"])?;
            let figs = solver_figures(&reference_solver_config(), band)?;
            let f: &Fig2 = &figs.fig2;
            let (_, rows) = trace_table(&f.report);
            out.csv("fig2.csv", &["k", "stage5", "stage5_plus_ln2", "noise_flag"], &rows)?;
            out.json(
                "fig2.json",
                &json!({
                    "quantity": "best |stage5 + ln 2| / ln 2",
                    "headline": FIG2_HEADLINE,
                    "computed": f.best_relative,
                    "best_value": f.best,
                    "at_k": f.best_at,
                    "c_star": f.report.c_star,
                    "report_k_max": report_k_max,
                }),
            )?;
            println!(
                "fig2: best |stage5 + ln 2|/ln 2  headline <= {FIG2_HEADLINE}  computed {:.5} (k = {}, stage5 + ln 2 = {:.4e})",
                f.best_relative, f.best_at, f.best
            );
        }
        Figure::Fig3 => {
            out.reserve(&["fig3.csv", "fig3_coefficients.csv", "fig3.json"])?;
            let bits = bits.unwrap_or(REFERENCE_EXACT_BITS);
            let f = fig3(&reference_exact_symbol(), REFERENCE_EXACT_K, bits, DEFAULT_TERM_CAP)?;
            with_precision(bits, || -> Result<(), CliError> {
                let (header, rows) = trace_table(&f.report);
                out.csv("fig3.csv", &header, &rows)?;
                Ok(())
            })?;
            let rows: Vec<Vec<String>> = f
                .vhat
                .iter()
                .zip(&f.term_counts)
                .enumerate()
                .map(|(i, (v, n))| vec![(i + 1).to_string(), dec(v), n.to_string(), bits.to_string()])
                .collect();
            out.csv("fig3_coefficients.csv", &["k", "vhat", "terms", "precision_bits"], &rows)?;
            out.json(
                "fig3.json",
                &json!({
                    "quantity": "tail of stage5 + ln 2",
                    "headline": FIG3_HEADLINE,
                    "computed": f.tail_discrepancy,
                    "c_star": f.c_star,
                    "precision_bits": bits,
                }),
            )?;
            println!(
                "fig3: tail stage5 + ln 2  headline {FIG3_HEADLINE:e}  computed {:.4e}; C* = {:.6} vs 1/ln 2 = {:.6}",
                f.tail_discrepancy,
                f.c_star,
                1.0 / LN_2
            );
        }
    }
    Ok(())
}
