//! Acceptance criteria 1–10, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines show up in `cargo test` output.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use njk_algebroid::{a_torsion, check_lie_algebroid, deformed_structure, tangent_lift_triple, AlgebroidData, BundleMapU};
use njk_catalog::{lookup, prelie, CatalogEntry, Polarity, PreLie, Quantity, NAMES};
use njk_cli::{catalog_document, parse_document, run_document};
use njk_graded::{
    chart_of, euler_check, euler_condition, graded_lie_derivative, homological_field, linear_lift, theorem1_check,
    vertical_endomorphism,
};
use njk_groupoid::{algebroid_of, base_projection, delta_0, delta_minus1, lemma_check, multiplicative_check, theorem2_check};
use njk_symexpr::{parse_with, Mode, ModePreference, Outcome, Report, Scalar, Status, SymbolTable, Verdict, VerificationResult, VerifyConfig};
use njk_tensorcalc::{fn_bracket, linalg, nijenhuis_torsion, Chart, VVForm};

type Outcome_ = Result<String, String>;

fn exact() -> VerifyConfig {
    VerifyConfig { mode: ModePreference::Exact, ..Default::default() }
}

fn sampled() -> VerifyConfig {
    VerifyConfig { mode: ModePreference::Sample, samples: 25, tol: 1e-9, seed: 0, ..Default::default() }
}

/// Exact for everything except entries with transcendental data.
fn cfg_for(e: &CatalogEntry) -> VerifyConfig {
    if e.sampled {
        sampled()
    } else {
        exact()
    }
}

fn proved_zero(r: &VerificationResult) -> bool {
    r.verdict == Verdict::ProvedZero
}

fn proved_nonzero(r: &VerificationResult) -> bool {
    matches!(r.verdict, Verdict::ProvedNonzero { .. })
}

/// Zero in the sense the configuration allows: proved, or sampled when
/// sampling was requested.
fn zero_for(r: &VerificationResult, cfg: &VerifyConfig) -> bool {
    match cfg.mode {
        ModePreference::Exact => proved_zero(r),
        _ => r.is_zero(),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn check<'a>(rep: &'a Report, name: &str) -> Result<&'a VerificationResult, String> {
    let c = rep.get(name).ok_or_else(|| format!("report `{}` has no check `{name}`", rep.title))?;
    c.result().ok_or_else(|| format!("`{name}` is not an identity check"))
}

fn groupoid_entries() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| lookup(n).unwrap()).filter(|e| e.presentation.is_some()).collect()
}

fn random_poly(rng: &mut ChaCha8Rng, c: &Chart) -> Scalar {
    let mut acc = Scalar::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut term = Scalar::int(rng.gen_range(-3..=3));
        for _ in 0..rng.gen_range(0..=2) {
            term = &term * &c.coord_scalar(rng.gen_range(0..c.dim()));
        }
        acc = &acc + &term;
    }
    acc
}

fn random_tensor(rng: &mut ChaCha8Rng, c: &Chart) -> VVForm {
    let n = c.dim();
    let m: Vec<Vec<Scalar>> = (0..n).map(|_| (0..n).map(|_| random_poly(rng, c)).collect()).collect();
    VVForm::from_matrix(c, &m).unwrap()
}

fn criterion_1() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut nonzero = 0;
    let mut count = 0;
    for dim in [2usize, 3] {
        let names = ["x1", "x2", "x3"];
        let c = Chart::new("R", &names[..dim]).unwrap();
        for k in 0..20 {
            let n = random_tensor(&mut rng, &c);
            let t = nijenhuis_torsion(&n).map_err(|e| e.to_string())?;
            let half = fn_bracket(&n, &n).map_err(|e| e.to_string())?.scale(&Scalar::ratio(1, 2));
            let r = t.verify_eq(&half, &exact()).map_err(|e| e.to_string())?;
            ensure(proved_zero(&r), || format!("dim {dim} tensor #{k}: T_N − ½[N,N]^fn is {r}"))?;
            nonzero += !t.is_zero() as usize;
            count += 1;
        }
    }
    // the oracle is vacuous if every sample happens to be Nijenhuis
    ensure(nonzero >= count / 2, || format!("only {nonzero} of {count} random tensors have nonzero torsion"))?;
    Ok(format!("{count} random tensors in dims 2 and 3, {nonzero} with nonzero torsion"))
}

fn criterion_2() -> Outcome_ {
    let table = SymbolTable::standard().with_generic(&[("F", 1), ("f", 1), ("g", 1)]).unwrap();
    let p = |s: &str| parse_with(s, &table).unwrap();
    let r1 = Chart::new("R1", &["x"]).unwrap();
    let r2 = Chart::new("R2", &["x1", "x2"]).unwrap();
    let diag = |a: Scalar, b: Scalar| vec![vec![a, Scalar::zero()], vec![Scalar::zero(), b]];
    let prelie_n = lookup("prelie").unwrap().nijenhuis.unwrap();
    let vertical = lookup("double_tangent").unwrap().nijenhuis.unwrap();
    let cases: Vec<(&str, VVForm)> = vec![
        ("0", VVForm::zero(&r2, 1)),
        ("𝕀", VVForm::identity(&r2)),
        ("F·𝕀", VVForm::from_matrix(&r1, &vec![vec![p("F(x)")]]).unwrap()),
        ("diag(f,g)", VVForm::from_matrix(&r2, &diag(p("f(x1)"), p("g(x2)"))).unwrap()),
        ("pre-Lie linear", prelie_n),
        ("vertical endomorphism", vertical),
    ];
    for (label, n) in &cases {
        let rep = check_lie_algebroid(&deformed_structure(n).map_err(|e| e.to_string())?, &exact());
        ensure(rep.passed(), || format!("(TM)_N for N = {label} fails:\n{rep}"))?;
        let all_exact = rep.checks.iter().all(|c| c.result().map_or(true, proved_zero));
        ensure(all_exact, || format!("(TM)_N for N = {label}: not every identity is ProvedZero"))?;
        let t = nijenhuis_torsion(n).map_err(|e| e.to_string())?.verify_zero(&exact());
        ensure(proved_zero(&t), || format!("T_N for N = {label} is {t}"))?;
    }
    let broken = lookup("broken_nijenhuis").unwrap().nijenhuis.unwrap();
    let rep = check_lie_algebroid(&deformed_structure(&broken).map_err(|e| e.to_string())?, &exact());
    ensure(!rep.passed(), || "(TM)_N of the broken control passes the algebroid identities".into())?;
    let t = nijenhuis_torsion(&broken).map_err(|e| e.to_string())?.verify_zero(&exact());
    ensure(proved_nonzero(&t), || format!("broken control torsion is {t}"))?;
    Ok(format!("{} Nijenhuis operators pass, broken control fails with T_N ≠ 0", cases.len()))
}

const C_CHECK: &str = "(c) [[d_A,U↑],U↑] = 0";
const D_CHECK: &str = "(d) [d_dR,d_A] = 0";

fn criterion_3() -> Outcome_ {
    let mut names = Vec::new();
    for name in NAMES {
        let e = lookup(name).unwrap();
        let Some(n) = e.nijenhuis.as_ref().filter(|_| e.polarity == Polarity::Positive) else { continue };
        let a = deformed_structure(n).map_err(|e| e.to_string())?;
        let rep = theorem1_check(&a, &BundleMapU::identity(&n.chart), &exact()).map_err(|e| e.to_string())?;
        for c in [C_CHECK, D_CHECK] {
            let r = check(&rep, c)?;
            ensure(proved_zero(r), || format!("{name}: {c} is {r}"))?;
        }
        // L_{d_N} V against the lift of ([−,N]^fn, N, N)
        let chart = chart_of(&a);
        let ldv = graded_lie_derivative(&homological_field(&a), &vertical_endomorphism(&chart).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let lift = linear_lift(&chart, &tangent_lift_triple(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let r = ldv.verify_eq(&lift, &exact()).map_err(|e| e.to_string())?;
        ensure(proved_zero(&r), || format!("{name}: L_(d_A)V − lift is {r}"))?;
        names.push(*name);
    }
    ensure(names.len() >= 7, || format!("only {} catalog operators found", names.len()))?;
    let broken = lookup("broken_nijenhuis").unwrap();
    let n = broken.nijenhuis.unwrap();
    let u = BundleMapU::new(&n.chart, n.dim(), linalg::mat_add(&linalg::identity(n.dim()), &n.matrix())).unwrap();
    let rep = theorem1_check(&AlgebroidData::tangent(&n.chart), &u, &exact()).map_err(|e| e.to_string())?;
    for c in [C_CHECK, D_CHECK] {
        let r = check(&rep, c)?;
        ensure(proved_nonzero(r), || format!("broken control: {c} is {r}"))?;
    }
    Ok(format!("(c), (d) and L_(d_A)V = lift on {} operators; broken control (c), (d) ProvedNonzero", names.len()))
}

fn criterion_4() -> Outcome_ {
    let names = ["a", "b", "c", "d"];
    for n in 1..=4 {
        let c = Chart::new("R", &names[..n]).unwrap();
        let r = euler_check(&c, &exact());
        ensure(proved_zero(&r), || format!("ι_(d_dR)V − E in dim {n} is {r}"))?;
    }
    // forcing: perturbing any single anchor entry breaks ι_Q V = E, while
    // ρ = 𝕀 satisfies it whatever the bracket
    for n in 1..=3 {
        let c = Chart::new("R", &names[..n]).unwrap();
        let zero_c = vec![vec![Scalar::zero(); n]; n * (n - 1) / 2];
        for i in 0..n {
            for j in 0..n {
                let mut rho = linalg::identity(n);
                rho[i][j] = &rho[i][j] + &c.coord_scalar(0);
                let a = AlgebroidData::new(&c, n, rho, zero_c.clone()).unwrap();
                let r = euler_condition(&homological_field(&a), &exact()).map_err(|e| e.to_string())?;
                ensure(proved_nonzero(&r), || format!("dim {n}: ρ = 𝕀 + a·E({i},{j}) passes the contraction ({r})"))?;
            }
        }
        let structure: Vec<Vec<Scalar>> = (0..n * (n - 1) / 2).map(|k| (0..n).map(|g| c.coord_scalar((k + g) % n)).collect()).collect();
        let a = AlgebroidData::new(&c, n, linalg::identity(n), structure).unwrap();
        let r = euler_condition(&homological_field(&a), &exact()).map_err(|e| e.to_string())?;
        ensure(proved_zero(&r), || format!("dim {n}: ρ = 𝕀 fails the contraction ({r})"))?;
    }
    Ok("ι_(d_dR)V = E in dims 1–4; every anchor perturbation of 𝕀 in dims 1–3 detected".into())
}

fn criterion_5() -> Outcome_ {
    let mut done = Vec::new();
    for e in groupoid_entries() {
        let cfg = cfg_for(&e);
        let p = e.presentation.as_ref().unwrap();
        let u = e.u.as_ref().ok_or_else(|| format!("{} has no U", e.name))?;
        let rep = theorem2_check(p, u, &cfg).map_err(|x| x.to_string())?;
        ensure(rep.passed(), || format!("{}:\n{rep}", e.name))?;
        for prefix in ["axioms/", "(1a)", "(1b)", "(1c)", "(2)", "(3) s_*δU = t_*δU", "(3) T_N = 0"] {
            ensure(rep.checks.iter().any(|c| c.name.starts_with(prefix)), || format!("{}: no `{prefix}` check", e.name))?;
        }
        if cfg.mode == ModePreference::Exact {
            let all_exact = rep.checks.iter().all(|c| c.result().map_or(true, |r| r.mode == Mode::Exact && !r.is_unknown()));
            ensure(all_exact, || format!("{}: a check was not decided exactly", e.name))?;
        }
        let alg = algebroid_of(p, &cfg).map_err(|x| x.to_string())?;
        let du = delta_minus1(p, &alg, u, &cfg).map_err(|x| x.to_string())?;
        let n = e.nijenhuis.as_ref().unwrap();
        for (which, via) in [("s", &p.s), ("t", &p.t)] {
            let proj = base_projection(p, &du.tensor, via).map_err(|x| x.to_string())?;
            let r = proj.verify_eq(n, &cfg).map_err(|x| x.to_string())?;
            ensure(zero_for(&r, &cfg), || format!("{}: {which}_*δU − N is {r}", e.name))?;
        }
        let want = e.expected(Quantity::DeltaU).ok_or_else(|| format!("{} has no closed form for δU", e.name))?;
        let r = du.tensor.verify_eq(want, &cfg).map_err(|x| x.to_string())?;
        ensure(zero_for(&r, &cfg), || format!("{}: δU differs from its closed form ({r})", e.name))?;
        done.push(e.name.clone());
    }
    // the closed forms that are fixed independently of the catalog builders
    let tm = lookup("tm_plus").unwrap();
    ensure(tm.expected(Quantity::DeltaU).unwrap().is_zero(), || "δU on (TM)+ is not 0".into())?;
    let pair = lookup("pair_groupoid").unwrap();
    let g = &pair.presentation.as_ref().unwrap().g;
    ensure(pair.expected(Quantity::DeltaU).unwrap() == &VVForm::identity(g), || "δU on M×M is not 𝕀".into())?;
    Ok(format!("theorem 2 and δU regression on {} (flow entry sampled, N=25, tol=1e-9)", done.join(", ")))
}

fn criterion_6() -> Outcome_ {
    for name in ["pair_groupoid", "double_tangent", "projection_groupoid"] {
        let e = lookup(name).unwrap();
        let rep = lemma_check(e.presentation.as_ref().unwrap(), e.u.as_ref().unwrap(), &exact()).map_err(|x| x.to_string())?;
        ensure(rep.passed(), || format!("{name}:\n{rep}"))?;
        let all = rep.checks.iter().all(|c| c.result().map_or(c.status() == Status::Pass, proved_zero));
        ensure(all, || format!("{name}: lemma not proved exactly"))?;
    }
    let mut graded = 0;
    for name in NAMES {
        let e = lookup(name).unwrap();
        if e.polarity != Polarity::Positive {
            continue;
        }
        let cfg = exact();
        let a = match (&e.algebroid, &e.presentation) {
            (Some(a), _) => a.clone(),
            (None, Some(p)) => algebroid_of(p, &cfg).map_err(|x| x.to_string())?.data,
            _ => continue,
        };
        let Some(u) = &e.u else { continue };
        if a.rank != a.dim() {
            continue;
        }
        let rep = theorem1_check(&a, u, &cfg).map_err(|x| x.to_string())?;
        let r = check(&rep, "(e) L_{d_A}U↑ = lift(D, ℓ, T^M)")?;
        ensure(proved_zero(r), || format!("{name}: L_(d_A)U↑ − lift(lemma triple) is {r}"))?;
        graded += 1;
    }
    ensure(graded >= 6, || format!("graded half ran on only {graded} algebroids"))?;
    Ok(format!("lemma on pair, TTB, projection; graded half on {graded} catalog algebroids"))
}

fn criterion_7() -> Outcome_ {
    let mut names = Vec::new();
    for e in groupoid_entries() {
        let cfg = cfg_for(&e);
        let p = e.presentation.as_ref().unwrap();
        let alg = algebroid_of(p, &cfg).map_err(|x| x.to_string())?;
        let du = delta_minus1(p, &alg, e.u.as_ref().unwrap(), &cfg).map_err(|x| x.to_string())?;
        let dd = delta_0(p, &du.tensor, &cfg).map_err(|x| x.to_string())?.verify_zero(&cfg);
        ensure(zero_for(&dd, &cfg), || format!("{}: δ(δU) is {dd}", e.name))?;
        for (label, t) in [("δU", du.tensor.clone()), ("𝕀_G", VVForm::identity(&p.g))] {
            let rep = multiplicative_check(p, &t, &cfg).map_err(|x| x.to_string())?;
            ensure(rep.passed(), || format!("{}: {label} is not multiplicative:\n{rep}", e.name))?;
        }
        // a quadratic bump in the last diagonal entry breaks multiplicativity
        // (on TM a bump in a base direction alone would still be multiplicative)
        let mut m = du.tensor.matrix();
        let last = p.g.dim() - 1;
        let gl = p.g.coord_scalar(last);
        m[last][last] = &m[last][last] + &(&gl * &gl);
        let bad = VVForm::from_matrix(&p.g, &m).unwrap();
        let rep = multiplicative_check(p, &bad, &cfg).map_err(|x| x.to_string())?;
        ensure(!rep.passed(), || format!("{}: mutated δU passes", e.name))?;
        let witnessed = rep.failures().iter().any(|c| matches!(&c.outcome, Outcome::Identity(r) if r.witness().is_some()));
        ensure(witnessed, || format!("{}: mutated δU fails without a witness:\n{rep}", e.name))?;
        names.push(e.name.clone());
    }
    Ok(format!("δ² = 0 and multiplicativity on {}; mutations rejected with witnesses", names.join(", ")))
}

fn criterion_8() -> Outcome_ {
    let mut n = 0;
    for e in groupoid_entries() {
        let p = e.presentation.as_ref().unwrap();
        let rep = theorem2_check(p, e.u.as_ref().unwrap(), &exact()).map_err(|x| x.to_string())?;
        let r = check(&rep, "(4) T_→U = →(T^A_U)")?;
        ensure(proved_zero(r), || format!("{}: T_→U − →(T^A_U) is {r}", e.name))?;
        n += 1;
    }
    let mut pairs = 0;
    let nonabelian = PreLie::new(2, {
        let mut c = vec![vec![vec![Scalar::zero(); 2]; 2]; 2];
        c[1][0][0] = Scalar::one();
        c
    })
    .map_err(|e| e.to_string())?;
    for e in [lookup("prelie").unwrap(), prelie(&nonabelian).map_err(|e| e.to_string())?] {
        let a = e.algebroid.as_ref().unwrap();
        let t = a_torsion(a, e.u.as_ref().unwrap()).map_err(|x| x.to_string())?;
        for i in 0..a.dim() {
            for j in i + 1..a.dim() {
                for (g, v) in t.value(i, j).iter().enumerate() {
                    let r = njk_symexpr::is_zero(v, &exact());
                    ensure(proved_zero(&r), || format!("pre-Lie T^A_U(∂{i},∂{j}) component {g} is {r}"))?;
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("T_→U = →T^A_U exactly on {n} groupoids; pre-Lie T^A_U = 0 on {pairs} basis pairs"))
}

fn criterion_9() -> Outcome_ {
    for n in 1..=3 {
        let e = lookup(&format!("pair_groupoid:{n}")).map_err(|e| e.to_string())?;
        let p = e.presentation.as_ref().unwrap();
        let alg = algebroid_of(p, &exact()).map_err(|x| x.to_string())?;
        let du = delta_minus1(p, &alg, &BundleMapU::identity(&p.m), &exact()).map_err(|x| x.to_string())?;
        // 𝕀 on M×M written out by hand rather than through VVForm::identity
        let big = p.g.dim();
        let id: Vec<Vec<Scalar>> =
            (0..big).map(|i| (0..big).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect();
        let r = du.tensor.verify_eq(&VVForm::from_matrix(&p.g, &id).unwrap(), &exact()).map_err(|x| x.to_string())?;
        ensure(proved_zero(&r), || format!("n = {n}: δ𝕀_M − 𝕀_(M×M) is {r}"))?;
    }
    Ok("δ𝕀_M = 𝕀_(M×M) for dim M = 1, 2, 3".into())
}

const DOC: &str = "\
symbol f/1
chart M = (x, y)
tensor N on M = [[f(x), 0], [0, y^2]]
tensor B on M = [[y, 0], [0, 0]]
task torsion N
task torsion B expect fail
task catalog flow_groupoid
task catalog broken_nijenhuis
";

fn criterion_10() -> Outcome_ {
    let doc = parse_document(DOC).map_err(|e| e.to_string())?;
    let cfg = VerifyConfig { seed: 7, mode: ModePreference::Sample, ..Default::default() };
    let a = run_document(&doc, &cfg, "acceptance").machine();
    let b = run_document(&doc, &cfg, "acceptance").machine();
    ensure(a == b, || "two library runs differ".into())?;
    let c = run_document(&catalog_document("flow_groupoid"), &cfg, "x").machine();
    let d = run_document(&catalog_document("flow_groupoid"), &cfg, "x").machine();
    ensure(c == d, || "catalog runs differ".into())?;

    let bin = env!("CARGO_BIN_EXE_njk");
    let out = |args: &[&str], seed_env: Option<&str>| -> Result<Vec<u8>, String> {
        let mut cmd = Command::new(bin);
        cmd.args(args).env_remove("NJK_SEED");
        if let Some(s) = seed_env {
            cmd.env("NJK_SEED", s);
        }
        let o = cmd.output().map_err(|e| e.to_string())?;
        ensure(o.status.code() == Some(0), || format!("njk {args:?} exited with {:?}", o.status.code()))?;
        Ok(o.stdout)
    };
    let args = ["catalog", "flow_groupoid", "--mode", "sample", "--seed", "7", "--samples", "25", "--tol", "1e-9", "--report", "machine"];
    let r1 = out(&args, None)?;
    let r2 = out(&args, None)?;
    ensure(r1 == r2, || "two CLI runs differ".into())?;
    let env_args = ["catalog", "flow_groupoid", "--mode", "sample", "--samples", "25", "--tol", "1e-9", "--report", "machine"];
    let r3 = out(&env_args, Some("7"))?;
    ensure(r1 == r3, || "NJK_SEED=7 differs from --seed 7".into())?;
    Ok(format!("library and CLI machine reports byte-identical ({} and {} bytes)", a.len(), r1.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome_); 10] = [
        ("torsion/FN oracle", criterion_1),
        ("algebroid soundness", criterion_2),
        ("theorem 1, both forms", criterion_3),
        ("Euler proposition", criterion_4),
        ("theorem 2 end-to-end", criterion_5),
        ("lemma on δU", criterion_6),
        ("δ² = 0 and multiplicativity", criterion_7),
        ("A-torsion lift", criterion_8),
        ("canonical class 𝕀 = δ𝕀", criterion_9),
        ("engine determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (label, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2}: PASS  {label} ({secs:.1} s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {label} ({secs:.1} s): {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
