//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits with a failure status if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{random_network, random_subspace, rates_of, rel_err};
use gmak::birch::NewtonOptions;
use gmak::chirotope::sign_sets_equal_by_enumeration;
use gmak::kinetics::PowerLawSystem;
use gmak::matrix::{int, to_f64, Rational, RationalMatrix};
use gmak::signs::{duality_check, enumerate_sign_vectors, is_conservative, DEFAULT_ENUM_LIMIT};
use gmak::subspace::{direct_deficiencies, kernel_basis, structural_deficiencies};
use gmak::{
    analyze, check_uniqueness, circulation_rates, conservation_residuals, decompose, face_lattice,
    find_dominant_lattice_iso, integrate, kernel_positive_basis, kinetic_order_subspace, laplacian,
    multistationarity_witness, orthogonal_complement, parse_network, pseudo_reaction_transform,
    rate_jacobian, sign_sets_equal, solve_in_class, stoichiometric_subspace, BirchMap,
    GeneralizedNetwork, SignVector, SubspaceBasis,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)*)),
        }
    };
}

const BINDING: &str = "A + B <=> C";
const BINDING_FRACTIONAL: &str = "A + B <=> C\nA + B ~ 1/2 A + 3/2 B\nC ~ 2C";
const BINDING_HIGH_ORDER: &str = "A + B <=> C\nA + B ~ 2A + 3/2 B\nC ~ 2C";
const BISTABLE: &str = "A + B <=> C\nC ~ 2B + C";

fn net(text: &str) -> GeneralizedNetwork {
    parse_network(text).expect("valid network")
}

fn signs(list: &[&str]) -> BTreeSet<SignVector> {
    list.iter().map(|s| s.parse().expect("sign vector")).collect()
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for text in [BINDING, BINDING_FRACTIONAL] {
        let n = net(text);
        let a = analyze(&n, DEFAULT_ENUM_LIMIT).map_err(|e| e.to_string())?;
        let d = &a.deficiencies;
        let g = decompose(&n);
        ensure!(d.m == 2 && d.l == 1, "m = {}, l = {}", d.m, d.l);
        ensure!(d.s == 1 && d.s_tilde == 1, "s = {}, s~ = {}", d.s, d.s_tilde);
        ensure!(d.delta == 0 && d.delta_tilde == 0, "deficiencies {} {}", d.delta, d.delta_tilde);
        ensure!(g.weakly_reversible, "not weakly reversible");
        ensure!(a.verdict.conservative, "not conservative");
        ensure!(
            a.conservation_witness == Some(vec![int(1), int(1), int(2)]),
            "conservation witness {:?}",
            a.conservation_witness
        );
        ensure!(a.verdict.sign_sets_equal, "sign sets differ");
        ensure!(a.verdict.genthm_applies, "theorem does not apply");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("both parameter sets, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let original = net(BINDING_HIGH_ORDER);
    let t = pseudo_reaction_transform(&original).map_err(|e| e.to_string())?;
    let g = decompose(&t);
    ensure!(t.complex_count() == 4, "{} complexes", t.complex_count());
    ensure!(g.l() == 2, "{} linkage classes", g.l());
    ensure!(!g.weakly_reversible, "weakly reversible");
    let d = structural_deficiencies(&t).map_err(|e| e.to_string())?;
    ensure!(d.delta == 1, "deficiency {}", d.delta);
    ensure!(
        stoichiometric_subspace(&t).same_subspace(&stoichiometric_subspace(&original)),
        "stoichiometric subspace changed"
    );
    // The fractional orders 1/2 A + 3/2 B cannot be rewritten without a
    // negative coefficient.
    ensure!(
        pseudo_reaction_transform(&net(BINDING_FRACTIONAL)).is_err(),
        "negative coefficient not detected"
    );
    Ok("a = 2, b = 3/2, c = 2".into())
}

fn criterion_3() -> Outcome {
    let n = net(BISTABLE);
    let s = stoichiometric_subspace(&n);
    let st = kinetic_order_subspace(&n);
    let lim = DEFAULT_ENUM_LIMIT;
    let sigma_s: BTreeSet<SignVector> =
        enumerate_sign_vectors(&s, lim).map_err(|e| e.to_string())?.iter().cloned().collect();
    ensure!(sigma_s == signs(&["000", "--+", "++-"]), "σ(S) = {sigma_s:?}");
    let sperp_t = orthogonal_complement(&st);
    let sigma_t: BTreeSet<SignVector> =
        enumerate_sign_vectors(&sperp_t, lim).map_err(|e| e.to_string())?.iter().cloned().collect();
    let expected = signs(&[
        "000", "+++", "---", "+0+", "-0-", "+-+", "-+-", "0-+", "0+-", "--+", "++-", "--0", "++0",
    ]);
    ensure!(sigma_t == expected, "σ(S~⊥) = {sigma_t:?}");
    ensure!(
        sigma_s.intersection(&sigma_t).any(|v| v.to_string() == "--+"),
        "(-,-,+) missing from the intersection"
    );
    let u = check_uniqueness(&n, lim).map_err(|e| e.to_string())?;
    ensure!(!u.unique, "uniqueness reported");
    let v_lat = face_lattice(&orthogonal_complement(&s), lim).map_err(|e| e.to_string())?;
    let vt_lat = face_lattice(&sperp_t, lim).map_err(|e| e.to_string())?;
    let as_set = |l: &gmak::FaceLattice| l.elements().iter().cloned().collect::<BTreeSet<_>>();
    ensure!(as_set(&v_lat) == signs(&["000", "0++", "+0+", "+++"]), "V lattice {:?}", v_lat.elements());
    ensure!(as_set(&vt_lat) == signs(&["000", "+0+", "++0", "+++"]), "V~ lattice {:?}", vt_lat.elements());
    ensure!(find_dominant_lattice_iso(&vt_lat, &v_lat).is_none(), "dominant isomorphism found");
    let a = analyze(&n, lim).map_err(|e| e.to_string())?;
    ensure!(!a.verdict.genthm_applies, "theorem applies");
    ensure!(!a.verdict.surjectivity_hypothesis, "surjectivity hypothesis holds");
    Ok("sign sets, lattices and verdict match".into())
}

/// Positive solutions of K[A][B] = [B]²[C] with A + C = Σ_AC, B + C = Σ_BC.
fn closed_form(k: f64, sac: f64, sbc: f64) -> Vec<[f64; 3]> {
    let p = k + sbc;
    let disc = p * p - 4.0 * k * sac;
    if disc < 0.0 {
        return Vec::new();
    }
    let mut out: Vec<[f64; 3]> = [(p - disc.sqrt()) / 2.0, (p + disc.sqrt()) / 2.0]
        .into_iter()
        .map(|c| [sac - c, sbc - c, c])
        .filter(|x| x.iter().all(|&v| v > 0.0))
        .collect();
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    out.dedup();
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let n = net(BISTABLE);
    let rates = [1.0, 1.0];
    let cstar = [1.0, 1.0, 1.0];
    let mut summary = Vec::new();
    for (sac, sbc, expected) in [(5.0, 4.0, 2), (2.0, 3.0, 1), (2.0, 1.0, 0)] {
        let oracle = closed_form(1.0, sac, sbc);
        ensure!(oracle.len() == expected, "oracle finds {} roots for ({sac}, {sbc})", oracle.len());
        let h = f64::min(sac, sbc) / 2.0;
        let cprime = [sac - h, sbc - h, h];
        let sols = solve_in_class(&n, &rates, &cstar, &cprime, 32, 0).map_err(|e| e.to_string())?;
        ensure!(
            sols.equilibria.len() == expected,
            "class ({sac}, {sbc}): {} equilibria, expected {expected}",
            sols.equilibria.len()
        );
        for (c, x) in sols.equilibria.iter().zip(&oracle) {
            for i in 0..3 {
                ensure!(rel_err(c[i], x[i]) <= 1e-8, "class ({sac}, {sbc}): {c:?} vs {x:?}");
            }
        }
        summary.push(format!("({sac},{sbc})→{}", sols.equilibria.len()));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("{} in {elapsed:.2?}", summary.join(" ")))
}

fn criterion_5() -> Outcome {
    let n = net(BISTABLE);
    let w = multistationarity_witness(&n, DEFAULT_ENUM_LIMIT).map_err(|e| e.to_string())?;
    let sys = PowerLawSystem::new(&n, &w.rates).map_err(|e| e.to_string())?;
    let [c1, c2] = &w.equilibria;
    for c in [c1, c2] {
        let r = sup(&sys.complex_balance(c).map_err(|e| e.to_string())?);
        ensure!(r <= 1e-9, "balance residual {r:e}");
    }
    let diff: Vec<f64> = c1.iter().zip(c2).map(|(a, b)| a - b).collect();
    ensure!(sup(&diff) > 1e-3, "equilibria coincide");
    // c¹ − c² ∈ S: orthogonal to every conservation law.
    let sperp = orthogonal_complement(&stoichiometric_subspace(&n));
    for v in sperp.vectors() {
        let dot: f64 = v.iter().zip(&diff).map(|(a, b)| to_f64(a) * b).sum();
        ensure!(dot.abs() <= 1e-8, "difference leaves S ({dot:e})");
    }
    Ok(format!("sign vector {}, rates {:?}", w.sign_vector, w.rates))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut wr_count = 0;
    let mut tl_count = 0;
    for i in 0..200 {
        let n = random_network(&mut rng, i % 2 == 0);
        let rates = rates_of(&n);
        let g = decompose(&n);
        // (a) kernel of A
        let a = laplacian(&n, &rates).map_err(|e| e.to_string())?;
        let ker = kernel_basis(&a);
        ensure!(ker.dim() == g.t(), "sample {i}: dim ker A = {} ≠ t = {}", ker.dim(), g.t());
        let chis = kernel_positive_basis(&n, &rates).map_err(|e| format!("sample {i}: {e}"))?;
        let terminal: BTreeSet<Vec<usize>> = g.terminal_classes().iter().map(|c| c.to_vec()).collect();
        let supports: BTreeSet<Vec<usize>> = chis
            .iter()
            .map(|chi| (0..chi.len()).filter(|&y| chi[y] != int(0)).collect())
            .collect();
        ensure!(supports == terminal, "sample {i}: kernel supports {supports:?} vs {terminal:?}");
        for chi in &chis {
            ensure!(a.mul_vec(chi).iter().all(|x| *x == int(0)), "sample {i}: Aχ ≠ 0");
        }
        // (b) deficiencies
        if g.t() == g.l() {
            tl_count += 1;
            let s = structural_deficiencies(&n).map_err(|e| e.to_string())?;
            let d = direct_deficiencies(&n, &rates).map_err(|e| e.to_string())?;
            ensure!(
                (s.delta, s.delta_tilde) == (d.delta, d.delta_tilde),
                "sample {i}: structural {:?} vs direct {:?}",
                (s.delta, s.delta_tilde),
                (d.delta, d.delta_tilde)
            );
        }
        // (e) circulations
        if g.weakly_reversible {
            wr_count += 1;
            let k = circulation_rates(&n).map_err(|e| e.to_string())?;
            let kr: Vec<Rational> = k.iter().map(|&x| Rational::from_integer((x as i64).into())).collect();
            ensure!(k.iter().all(|&x| x > 0), "sample {i}: zero circulation");
            let a = laplacian(&n, &kr).map_err(|e| e.to_string())?;
            let ones = vec![int(1); n.complex_count()];
            ensure!(a.mul_vec(&ones).iter().all(|x| *x == int(0)), "sample {i}: circulation unbalanced");
        }
    }
    let t_networks = start.elapsed();
    // (c) sign duality
    for i in 0..100 {
        let n = rng.random_range(1..=8);
        let d = rng.random_range(0..=n);
        let b = random_subspace(&mut rng, n, d);
        duality_check(&b, DEFAULT_ENUM_LIMIT).map_err(|e| format!("subspace {i}: {e}"))?;
    }
    let t_duality = start.elapsed() - t_networks;
    // (d) chirotopes against enumeration
    let mut equal_pairs = 0;
    for i in 0..100 {
        let n = rng.random_range(2..=7);
        let d = rng.random_range(1..n);
        let b1 = loop {
            let b = random_subspace(&mut rng, n, d);
            if b.dim() > 0 {
                break b;
            }
        };
        let b2 = match i % 3 {
            // Positive rescaling of coordinates keeps the sign vectors.
            0 => {
                let mut m = b1.matrix().clone();
                for r in 0..n {
                    let f = int(rng.random_range(1..=4));
                    for c in 0..m.cols() {
                        m[(r, c)] = &m[(r, c)] * &f;
                    }
                }
                SubspaceBasis::new(m).map_err(|e| e.to_string())?
            }
            1 => random_subspace(&mut rng, n, b1.dim().max(1)),
            _ => {
                let mut m: RationalMatrix = b1.matrix().clone();
                let r = rng.random_range(0..n);
                let c = rng.random_range(0..m.cols());
                m[(r, c)] = &m[(r, c)] + int(1);
                SubspaceBasis::span(&m.columns(), n)
            }
        };
        let fast = sign_sets_equal(&b1, &b2);
        let slow = sign_sets_equal_by_enumeration(&b1, &b2, DEFAULT_ENUM_LIMIT).map_err(|e| e.to_string())?;
        ensure!(fast == slow, "pair {i}: chirotope says {fast}, enumeration says {slow}");
        equal_pairs += usize::from(slow);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "200 networks ({wr_count} weakly reversible, {tl_count} with t = l), {equal_pairs}/100 equal sign-set pairs; networks {t_networks:.1?}, duality {t_duality:.1?}, chirotopes {:.1?}",
        elapsed - t_networks - t_duality
    ))
}

fn central_difference<F>(f: F, x: &[f64], rows: usize, h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut jac = DMatrix::zeros(rows, x.len());
    for j in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for i in 0..rows {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

fn relative_matrix_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / a.amax().max(b.amax()).max(1e-300)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = net(BISTABLE);
    let v = orthogonal_complement(&stoichiometric_subspace(&n));
    let vt = orthogonal_complement(&kinetic_order_subspace(&n));
    let mut worst_f: f64 = 0.0;
    for _ in 0..20 {
        let cstar: Vec<f64> = (0..3).map(|_| rng.random_range(0.2..3.0)).collect();
        let map = BirchMap::from_subspaces(cstar, &v, &vt).map_err(|e| e.to_string())?;
        let lambda: Vec<f64> = (0..map.d_tilde()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = map.jacobian(&lambda).map_err(|e| e.to_string())?;
        let fd = central_difference(
            |l| map.evaluate(l).expect("finite").as_slice().to_vec(),
            &lambda,
            map.d(),
            1e-5,
        );
        worst_f = worst_f.max(relative_matrix_error(&exact, &fd));
    }
    ensure!(worst_f <= 1e-6, "Birch map Jacobian error {worst_f:e}");

    let mut worst_r: f64 = 0.0;
    for text in [BISTABLE, BINDING_FRACTIONAL] {
        let n = net(text);
        for _ in 0..10 {
            let rates: Vec<f64> = (0..2).map(|_| rng.random_range(0.5..3.0)).collect();
            let c: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..3.0)).collect();
            let exact = rate_jacobian(&n, &rates, &c).map_err(|e| e.to_string())?;
            let sys = PowerLawSystem::new(&n, &rates).map_err(|e| e.to_string())?;
            let fd = central_difference(|x| sys.formation_rate(x).expect("positive"), &c, 3, 1e-5);
            worst_r = worst_r.max(relative_matrix_error(&exact, &fd));
        }
    }
    ensure!(worst_r <= 1e-6, "rate Jacobian error {worst_r:e}");

    let mut worst_drift: f64 = 0.0;
    for text in [BINDING_FRACTIONAL, BISTABLE] {
        let n = net(text);
        let c0 = [4.0, 3.0, 1.0];
        let traj = integrate(&n, &[1.0, 1.0], &c0, 100.0, 1e-8, 1e-10).map_err(|e| e.to_string())?;
        let sperp = orthogonal_complement(&stoichiometric_subspace(&n));
        let drift = conservation_residuals(&traj, &sperp);
        for (r, v) in drift.iter().zip(sperp.vectors()) {
            let scale: f64 = v.iter().zip(&c0).map(|(a, b)| to_f64(a).abs() * b).sum();
            worst_drift = worst_drift.max(r / scale);
        }
    }
    ensure!(worst_drift <= 1e-8, "conservation drift {worst_drift:e}");
    Ok(format!(
        "F' err {worst_f:.1e}, r' err {worst_r:.1e}, drift {worst_drift:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let options = NewtonOptions::default();
    let mut configs = 0;
    let mut attempts = 0;
    while configs < 20 {
        attempts += 1;
        ensure!(attempts < 10_000, "could not generate pointed configurations");
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=n.min(3));
        let cols = common::random_matrix_columns(&mut rng, n, d, 2);
        let Ok(basis) = SubspaceBasis::from_columns(&cols, n) else {
            continue;
        };
        if !is_conservative(&basis) {
            continue;
        }
        configs += 1;
        let cstar: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
        let cprime: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
        let map = BirchMap::from_subspaces(cstar, &basis, &basis).map_err(|e| e.to_string())?;
        let gamma = map.target_of(&cprime).map_err(|e| e.to_string())?;
        let base = map
            .solve(&gamma, &vec![0.0; d], &options)
            .map_err(|e| format!("configuration {configs}: from λ = 0: {e}"))?;
        for k in 0..32 {
            let start: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..=5.0)).collect();
            let sol = map
                .solve(&gamma, &start, &options)
                .map_err(|e| format!("configuration {configs}, restart {k}: {e}"))?;
            let dist = sol
                .lambda
                .iter()
                .zip(&base.lambda)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            ensure!(dist <= 1e-6, "configuration {configs}, restart {k}: distance {dist:e}");
        }
    }
    Ok("20 configurations × 33 starts agree".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 binding examples analyze", criterion_1),
        ("2 pseudo-reaction transform", criterion_2),
        ("3 sign sets and face lattices", criterion_3),
        ("4 equilibrium counts per class", criterion_4),
        ("5 multistationarity witness", criterion_5),
        ("6 random network properties", criterion_6),
        ("7 derivatives and conservation", criterion_7),
        ("8 Birch map inversion", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("PASS  criterion {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
