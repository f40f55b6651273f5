use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use alexcover::arith;
use alexcover::arrangements::{
    aomoto_complex, beta_tau, ceva, check_assumption_and_certificate, deleted_b3, deleted_monomial_arrangement,
    intersection_points, lift_multiplicity, pencil_complex, verify_multinet, LineArrangement, Multinet,
};
use alexcover::covers::{
    alexander_poly, alpha, cover_homology, divides, generic_local_system_dim, limit_scan, predicted_invariants,
    EquivariantComplex,
};
use alexcover::fox::{
    equivariant_complex_from_presentation, orbifold_presentation, EpimorphismToZ, GroupPresentation, OrbifoldData,
};
use alexcover::laurent::{canonical_rep, is_cyclotomic_type, mahler_measure, strip_unit_roots_at_one, MahlerMeasure};
use alexcover::{FieldSpec, LaurentPolyZ};
use num_bigint::BigInt;
use num_integer::Integer;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Construct, Options, Verb};
use crate::report::{to_value, CliError, CliResult, Provenance, Report};

const MAX_COVER_LIMIT: usize = 400;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Checks every flag before any computation starts.
pub fn validate(cli: &Cli) -> CliResult<()> {
    let o = &cli.opts;
    if o.chars.is_empty() {
        return Err(invalid("--chars: at least one characteristic is required"));
    }
    if let Some(p) = o.chars.iter().find(|&&p| p != 0 && !arith::is_prime(p)) {
        return Err(invalid(format!("--chars: {p} is not prime")));
    }
    if !(4..=MAX_COVER_LIMIT).contains(&o.max_cover) {
        return Err(invalid(format!("--max-cover: must lie in 4..={MAX_COVER_LIMIT}, got {}", o.max_cover)));
    }
    if !(o.tol.is_finite() && o.tol > 0.0) {
        return Err(invalid(format!("--tol: must be positive, got {}", o.tol)));
    }
    let nu = match &cli.verb {
        Verb::Invariants { nu, .. } | Verb::Cover { nu, .. } => nu.as_deref(),
        Verb::Arrangement { nu, .. } => Some(nu.as_slice()),
        _ => None,
    };
    if let Some(nu) = nu {
        let g = nu.iter().fold(0i64, |a, &b| a.gcd(&b));
        if g != 1 {
            return Err(invalid(format!("--nu: not an epimorphism, the images generate {g}Z")));
        }
    }
    match &cli.verb {
        Verb::Cover { n: Some(0), .. } => Err(invalid("--n: cover order must be positive")),
        Verb::Cover { n: Some(n), .. } if *n > MAX_COVER_LIMIT => {
            Err(invalid(format!("--n: must be at most {MAX_COVER_LIMIT}")))
        }
        Verb::Invariants { trials, .. } if *trials < 2 => Err(invalid("--trials: need at least 2")),
        _ => Ok(()),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
        invalid(format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
    })
}

fn load<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse(path, &read(path)?)
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// A complex file, or a presentation file together with `nu`.
fn load_complex(path: &Path, nu: Option<&[i64]>) -> CliResult<(EquivariantComplex, Value)> {
    let text = read(path)?;
    let raw: Value = parse(path, &text)?;
    let file = path.display().to_string();
    if raw.get("ranks").is_some() {
        if nu.is_some() {
            return Err(invalid("--nu applies to presentations, not complexes"));
        }
        let cx: EquivariantComplex = parse(path, &text)?;
        let inputs = json!({"file": file, "kind": "complex", "ranks": cx.ranks()});
        Ok((cx, inputs))
    } else if raw.get("generators").is_some() {
        let pres: GroupPresentation = parse(path, &text)?;
        let nu = nu.ok_or_else(|| invalid("--nu is required for a presentation"))?;
        let cx = equivariant_complex_from_presentation(&pres, &EpimorphismToZ::new(nu.to_vec()))?;
        let inputs = json!({"file": file, "kind": "presentation", "presentation": to_value(&pres)?, "nu": nu});
        Ok((cx, inputs))
    } else {
        Err(invalid(format!("{file}: expected a complex (\"ranks\") or a presentation (\"generators\")")))
    }
}

fn generic_field(p: u64) -> CliResult<std::sync::Arc<FieldSpec>> {
    Ok(if p == 0 { FieldSpec::rationals() } else { FieldSpec::with_min_size(p, 1000)? })
}

fn reversed(p: &LaurentPolyZ) -> LaurentPolyZ {
    LaurentPolyZ::new(0, p.coeffs().iter().rev().cloned().collect())
}

/// Mahler measure with the reciprocal polynomial as a second path.
fn mahler_checked(report: &mut Report, name: &str, p: &LaurentPolyZ, tol: f64) -> CliResult<MahlerMeasure> {
    let m = mahler_measure(p, tol)?;
    let r = mahler_measure(&reversed(p), tol)?;
    let slack = m.error_bound + r.error_bound + tol;
    let ok = m.exact == r.exact && (m.numeric - r.numeric).abs() <= slack;
    report.check(
        format!("{name}: reciprocal Mahler measure"),
        ok,
        true,
        format!("{:.15} vs {:.15}", m.numeric, r.numeric),
    );
    Ok(m)
}

fn scan_summary(scan: &alexcover::covers::LimitReport) -> CliResult<Value> {
    Ok(json!({
        "characteristic": scan.characteristic,
        "stabilized_alpha": scan.stabilized_alpha,
        "betti_defect_bound": scan.betti_defect_bound,
        "rows": to_value(&scan.rows)?,
    }))
}

fn check_scan(report: &mut Report, label: &str, scan: &alexcover::covers::LimitReport, expected: usize) {
    match scan.stabilized_alpha {
        Some(a) => report.check(
            format!("{label}: scan limit"),
            a == expected,
            true,
            format!("betti(N)/N settled on {a}, alpha = {expected}"),
        ),
        None => report.check(
            format!("{label}: scan limit"),
            true,
            false,
            format!("betti(N)/N not settled by N = {}", scan.rows.len()),
        ),
    }
}

fn check_torsion_rate(report: &mut Report, label: &str, scan: &alexcover::covers::LimitReport, target: f64) {
    if let Some(last) = scan.rows.last() {
        let slack = 0.1 * target.max(1.0);
        report.check(
            format!("{label}: torsion growth"),
            (last.torsion_ratio - target).abs() <= slack,
            false,
            format!("log|tor|/N = {:.6} at N = {}, Mahler measure {:.6}", last.torsion_ratio, last.n, target),
        );
    }
}

fn invariants(
    report: &mut Report,
    cx: &EquivariantComplex,
    degree: Option<usize>,
    trials: usize,
    o: &Options,
) -> CliResult<Value> {
    let degrees: Vec<usize> = match degree {
        Some(i) if i > cx.top_degree() => {
            return Err(invalid(format!("--degree: complex has degrees 0..={}", cx.top_degree())))
        }
        Some(i) => vec![i],
        None => (0..=cx.top_degree()).collect(),
    };
    let mut out = Vec::new();
    for i in degrees {
        let label = format!("degree {i}");
        let delta = alexander_poly(cx, i)?;
        let mahler = mahler_checked(report, &label, delta.poly(), o.tol)?;
        let mut alphas = BTreeMap::new();
        let mut generic = BTreeMap::new();
        let mut scans = Vec::new();
        for &p in &o.chars {
            let a = alpha(cx, i, p)?;
            let g = generic_local_system_dim(cx, i, &generic_field(p)?, trials, o.seed)?;
            report.check(
                format!("{label}, char {p}: generic fiber"),
                g.value == a,
                true,
                format!("generic dimension {} ({}stable), alpha {a}", g.value, if g.stable { "" } else { "not " }),
            );
            let scan = limit_scan(cx, i, o.max_cover, p)?;
            check_scan(report, &format!("{label}, char {p}"), &scan, a);
            if p == 0 {
                check_torsion_rate(report, &label, &scan, mahler.numeric);
            }
            scans.push(scan_summary(&scan)?);
            alphas.insert(p, a);
            generic.insert(p, to_value(&g)?);
        }
        out.push(json!({
            "degree": i,
            "alexander": delta.to_string(),
            "alexander_degree": delta.degree(),
            "mahler": to_value(&mahler)?,
            "alpha": alphas,
            "generic": generic,
            "scans": scans,
        }));
    }
    Ok(json!({ "degrees": out }))
}

fn cover(report: &mut Report, cx: &EquivariantComplex, ns: &[usize], chars: &[u64]) -> CliResult<Value> {
    let mut rows = Vec::new();
    for &n in ns {
        let rep = cover_homology(cx, n, chars, true)?;
        for d in &rep.degrees {
            let divisors = d.divisors.clone().unwrap_or_default();
            let mut row = serde_json::Map::new();
            row.insert("n".into(), json!(n));
            row.insert("degree".into(), json!(d.degree));
            for (p, b) in &d.betti {
                row.insert(format!("betti_{p}"), json!(b));
            }
            let order: BigInt = divisors.iter().product();
            row.insert("torsion_order".into(), json!(order.to_string()));
            row.insert("divisors".into(), json!(divisors.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
            rows.push(Value::Object(row));
            let Some(&b0) = d.betti.get(&0) else { continue };
            for (&p, &bp) in d.betti.iter().filter(|(&p, _)| p != 0) {
                let has = |k: usize| {
                    rep.degrees[k]
                        .divisors
                        .as_ref()
                        .is_some_and(|v| v.iter().any(|x| x.is_multiple_of(&BigInt::from(p))))
                };
                let witnessed = has(d.degree) || d.degree.checked_sub(1).is_some_and(has);
                report.check(
                    format!("N = {n}, degree {}, char {p}: universal coefficients", d.degree),
                    b0 <= bp && (b0 == bp || witnessed),
                    true,
                    format!("betti over Q {b0}, over F_{p} {bp}"),
                );
            }
        }
    }
    Ok(json!({ "rows": rows }))
}

fn orbifold(report: &mut Report, d: &OrbifoldData, o: &Options) -> CliResult<Value> {
    let pres = orbifold_presentation(d)?;
    let cx = equivariant_complex_from_presentation(&pres, &d.default_epimorphism())?;
    let delta = alexander_poly(&cx, 1)?;
    let mahler = mahler_checked(report, "degree 1", delta.poly(), o.tol)?;
    let predicted0 = predicted_invariants(d, 0)?;
    report.check(
        "exp M(delta_1) = product of cone orders",
        mahler.exact.as_ref() == Some(&predicted0.mahler1_exact),
        true,
        match &mahler.exact {
            Some(x) => format!("{x} vs {}", predicted0.mahler1_exact),
            None => format!("not of cyclotomic type, expected {}", predicted0.mahler1_exact),
        },
    );
    report.check(
        "delta_1 divisibility",
        divides(&predicted0.delta1_divisor, delta.poly()),
        true,
        format!("{} divides {delta}", predicted0.delta1_divisor),
    );
    let mut alphas = BTreeMap::new();
    let mut predicted = BTreeMap::new();
    let mut scans = Vec::new();
    for &p in &o.chars {
        let a = alpha(&cx, 1, p)?;
        let pr = predicted_invariants(d, p)?;
        report.check(
            format!("char {p}: alpha_1 closed form"),
            a == pr.alpha1,
            true,
            format!("computed {a}, predicted {}", pr.alpha1),
        );
        let scan = limit_scan(&cx, 1, o.max_cover, p)?;
        check_scan(report, &format!("char {p}"), &scan, a);
        if p == 0 {
            check_torsion_rate(report, "degree 1", &scan, mahler.numeric);
        }
        scans.push(scan_summary(&scan)?);
        alphas.insert(p, a);
        predicted.insert(p, pr.alpha1);
    }
    Ok(json!({
        "presentation": to_value(&pres)?,
        "presentation_text": pres.relators().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "alexander_1": delta.to_string(),
        "mahler_1": to_value(&mahler)?,
        "mahler_1_exp_predicted": predicted0.mahler1_exact.to_string(),
        "alpha_1": alphas,
        "alpha_1_predicted": predicted,
        "scans": scans,
    }))
}

fn arrangement(report: &mut Report, arr: &LineArrangement, nu: &[i64], chars: &[u64]) -> CliResult<Value> {
    let points = intersection_points(arr)?;
    let mut by_mult: BTreeMap<usize, usize> = BTreeMap::new();
    for pt in &points.points {
        *by_mult.entry(pt.multiplicity()).or_default() += 1;
    }
    let cx = aomoto_complex(arr, nu)?;
    let bt = beta_tau(&cx, chars)?;
    if let Some(&b0) = bt.beta1.get(&0) {
        for (&p, &bp) in bt.beta1.iter().filter(|(&p, _)| p != 0) {
            let divides_tau = bt.tau1.is_multiple_of(&BigInt::from(p));
            report.check(
                format!("char {p}: beta_1 jump iff p | tau_1"),
                b0 <= bp && ((bp > b0) == divides_tau),
                true,
                format!("beta_1 {b0} over Q, {bp} over F_{p}, tau_1 = {}", bt.tau1),
            );
        }
    }
    Ok(json!({
        "lines": arr.len(),
        "points_by_multiplicity": by_mult,
        "points": to_value(&points.points)?,
        "h1_rank": cx.h1_lines.len(),
        "h2_rank": cx.h2_points.len(),
        "beta_tau": to_value(&bt)?,
    }))
}

fn multinet(report: &mut Report, arr: &LineArrangement, mn: &Multinet) -> CliResult<Value> {
    let verdict = verify_multinet(arr, mn)?;
    let certificate = if mn.classes.len() == 3 {
        let cert = check_assumption_and_certificate(arr, mn)?;
        if let (true, Some(tau)) = (cert.assumption_ok, &cert.tau1) {
            let again = beta_tau(&aomoto_complex(&arr.with_infinity(None)?, &cert.nu)?, &[0])?;
            report.check("certificate tau_1 recomputed", &again.tau1 == tau, true, format!("{} vs {tau}", again.tau1));
        }
        to_value(&cert)?
    } else {
        Value::Null
    };
    Ok(json!({ "verdict": to_value(&verdict)?, "certificate": certificate }))
}

fn mahler(report: &mut Report, p: &LaurentPolyZ, tol: f64) -> CliResult<Value> {
    if p.is_zero() {
        return Err(invalid("the zero polynomial has no Mahler measure"));
    }
    let canon = canonical_rep(p)?;
    let m = mahler_checked(report, "input", p, tol)?;
    let stripped = strip_unit_roots_at_one(p)?;
    Ok(json!({
        "polynomial": p.to_string(),
        "canonical": canon.to_string(),
        "cyclotomic_type": is_cyclotomic_type(p)?,
        "mahler": to_value(&m)?,
        "stripped_at_one": stripped.eval_at_one().to_string(),
    }))
}

struct ConstructOutputs<'a> {
    arrangement: Option<&'a Path>,
    multinet: Option<&'a Path>,
    complex: Option<&'a Path>,
}

fn construct(what: &Construct, outs: &ConstructOutputs) -> CliResult<(Value, Value)> {
    let mut arrangement_obj = None;
    let mut multinet_obj = None;
    let mut complex_obj = None;
    let (inputs, results) = match what {
        Construct::Ceva { m } => {
            let (arr, mn) = ceva(*m)?;
            let r = json!({"arrangement": to_value(&arr)?, "multinet": to_value(&mn)?});
            arrangement_obj = Some(arr);
            multinet_obj = Some(mn);
            (json!({"construction": "ceva", "m": m}), r)
        }
        Construct::DeletedB3 => {
            let arr = deleted_b3();
            let r = json!({"arrangement": to_value(&arr)?});
            arrangement_obj = Some(arr);
            (json!({"construction": "deleted-b3"}), r)
        }
        Construct::DeletedMonomial { mu } => {
            let (arr, d) = deleted_monomial_arrangement(*mu)?;
            let r = json!({"arrangement": to_value(&arr)?, "orbifold": to_value(&d)?});
            arrangement_obj = Some(arr);
            (json!({"construction": "deleted-monomial", "mu": mu}), r)
        }
        Construct::Pencil { n } => {
            let arr = LineArrangement::pencil(n.len())?;
            let cx = pencil_complex(n.len(), n)?;
            let r = json!({"arrangement": to_value(&arr)?, "complex": to_value(&cx)?});
            arrangement_obj = Some(arr);
            complex_obj = Some(cx);
            (json!({"construction": "pencil", "n": n}), r)
        }
        Construct::Lift { chi, n, p } => {
            let lifted = lift_multiplicity(chi, *n, *p)?;
            (json!({"construction": "lift", "chi": chi, "n": n, "p": p}), json!({"lift": to_value(&lifted)?}))
        }
    };
    fn save<T: Serialize>(path: Option<&Path>, obj: Option<&T>, what: &str) -> CliResult<()> {
        match (path, obj) {
            (Some(path), Some(v)) => write_json(path, v),
            (Some(_), None) => Err(invalid(format!("this construction has no {what}"))),
            _ => Ok(()),
        }
    }
    save(outs.arrangement, arrangement_obj.as_ref(), "arrangement")?;
    save(outs.multinet, multinet_obj.as_ref(), "multinet")?;
    save(outs.complex, complex_obj.as_ref(), "complex")?;
    Ok((inputs, results))
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    validate(cli)?;
    let o = &cli.opts;
    let mut chars = o.chars.clone();
    chars.sort_unstable();
    chars.dedup();
    let o = &Options { chars, ..o.clone() };
    let scan_range = [1, o.max_cover];
    let (command, n_range) = match &cli.verb {
        Verb::Invariants { .. } => ("invariants", scan_range),
        Verb::Cover { n: Some(n), .. } => ("cover", [*n, *n]),
        Verb::Cover { n: None, .. } => ("cover", scan_range),
        Verb::Orbifold { .. } => ("orbifold", scan_range),
        Verb::Arrangement { .. } => ("arrangement", [0, 0]),
        Verb::Multinet { .. } => ("multinet", [0, 0]),
        Verb::Mahler { .. } => ("mahler", [0, 0]),
        Verb::Construct { .. } => ("construct", [0, 0]),
    };
    let mut report = Report {
        command,
        inputs: Value::Null,
        results: Value::Null,
        checks: Vec::new(),
        provenance: Provenance {
            seed: o.seed,
            n_range,
            tolerance: o.tol,
            characteristics: o.chars.clone(),
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    let (inputs, results) = match &cli.verb {
        Verb::Invariants { input, degree, nu, trials } => {
            let (cx, inputs) = load_complex(input, nu.as_deref())?;
            let r = invariants(&mut report, &cx, *degree, *trials, o)?;
            (inputs, r)
        }
        Verb::Cover { input, n, nu } => {
            let (cx, inputs) = load_complex(input, nu.as_deref())?;
            let ns: Vec<usize> = match n {
                Some(n) => vec![*n],
                None => (1..=o.max_cover).collect(),
            };
            let r = cover(&mut report, &cx, &ns, &o.chars)?;
            (inputs, r)
        }
        Verb::Orbifold { g, r, mu } => {
            let d = OrbifoldData::new(*g, *r, mu.clone())?;
            let res = orbifold(&mut report, &d, o)?;
            (json!({"g": g, "r": r, "mu": mu}), res)
        }
        Verb::Arrangement { input, nu } => {
            let arr: LineArrangement = load(input)?;
            let res = arrangement(&mut report, &arr, nu, &o.chars)?;
            (json!({"file": input.display().to_string(), "nu": nu}), res)
        }
        Verb::Multinet { arrangement: a, multinet: m } => {
            let arr: LineArrangement = load(a)?;
            let mn: Multinet = load(m)?;
            let res = multinet(&mut report, &arr, &mn)?;
            (json!({"arrangement": a.display().to_string(), "multinet": m.display().to_string()}), res)
        }
        Verb::Mahler { coeffs, min_exp } => {
            let p = LaurentPolyZ::new(*min_exp, coeffs.clone());
            let res = mahler(&mut report, &p, o.tol)?;
            let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            (json!({"min_exp": min_exp, "coeffs": c}), res)
        }
        Verb::Construct { what, arrangement_out, multinet_out, complex_out } => construct(
            what,
            &ConstructOutputs {
                arrangement: arrangement_out.as_deref(),
                multinet: multinet_out.as_deref(),
                complex: complex_out.as_deref(),
            },
        )?,
    };
    report.inputs = inputs;
    report.results = results;
    Ok(report)
}
