//! Exit criteria. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use peg_core::maslov::{image_torus_loop, maslov_index, minimum_maslov_number, torus_loop, DEFAULT_LOOP_SAMPLES};
use peg_core::quadrilateral::{is_cyclic, params_from_vertices, vertices_from_params};
use peg_core::{Complex64, Curve, CurveKind, FormWeights, Options, Params, Problem, TorusMap, ValidationOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_CURVES: usize = 50;
const PARAMS_PER_CURVE: usize = 10;
const CORPUS_SEED: u64 = 20_240_917;
const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(600);

type Verdict = Result<String, String>;

fn run_cli(args: &[String]) -> (u8, Vec<u8>, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("peg".to_string()).chain(args.iter().cloned());
    let code = peg_cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

struct Corpus {
    curves: Vec<PathBuf>,
    params: Vec<Vec<Params>>,
}

fn corpus_k(i: usize) -> usize {
    1 + i % 8
}

fn write_corpus(dir: &Path) -> Result<Corpus, String> {
    let mut curves = Vec::new();
    for i in 0..CORPUS_CURVES {
        let path = dir.join(format!("curve-{i:02}.txt"));
        let args = vec![
            "gen-curve".to_string(),
            "random".into(),
            "--seed".into(),
            (1000 + i).to_string(),
            "--k".into(),
            corpus_k(i).to_string(),
            "--decay".into(),
            "2.5".into(),
            "--out".into(),
            path.to_str().unwrap().into(),
        ];
        let (code, _, err) = run_cli(&args);
        if code != 0 {
            return Err(format!("gen-curve {i}: {}", String::from_utf8_lossy(&err)));
        }
        curves.push(path);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let pi = std::f64::consts::PI;
    let params = (0..CORPUS_CURVES)
        .map(|_| {
            (0..PARAMS_PER_CURVE)
                .map(|_| {
                    // (0.05, 0.5] as 0.5 - [0, 0.45).
                    let s = 0.5 - rng.gen_range(0.0..0.45);
                    let t = 0.5 - rng.gen_range(0.0..0.45);
                    let phi = rng.gen_range(0.1..pi - 0.1);
                    Params::new(s, t, phi).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(Corpus { curves, params })
}

fn load(path: &Path) -> Curve {
    Curve::parse_file(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Solves every corpus instance through the CLI; returns all stdout bytes.
fn solve_corpus(corpus: &Corpus, workers: usize, check: bool) -> Result<(Vec<Vec<u8>>, Duration), String> {
    let start = Instant::now();
    let mut outputs = Vec::new();
    for (i, path) in corpus.curves.iter().enumerate() {
        let diameter = if check {
            let c = load(path);
            c.validate(&ValidationOptions::for_curve(&c)).diameter
        } else {
            0.0
        };
        for q in &corpus.params[i] {
            let args = vec![
                "solve".to_string(),
                path.to_str().unwrap().into(),
                format!("{} {} {}", q.s(), q.t(), q.phi()),
                "--workers".into(),
                workers.to_string(),
            ];
            let (code, out, err) = run_cli(&args);
            if check {
                if code != 0 {
                    return Err(format!(
                        "curve {i} params {q:?}: exit {code}: {}",
                        String::from_utf8_lossy(&err).trim()
                    ));
                }
                for line in String::from_utf8_lossy(&out).lines() {
                    let res: f64 = line.split_whitespace().nth(4).unwrap().parse().unwrap();
                    if !(res < 1e-9 * diameter) {
                        return Err(format!("curve {i} params {q:?}: residual {res:e} >= 1e-9 * {diameter}"));
                    }
                }
            }
            outputs.push(out);
        }
    }
    Ok((outputs, start.elapsed()))
}

fn random_curves(n: u64) -> Vec<Curve> {
    (0..n).map(|i| Curve::generate(CurveKind::Random, 500 + i, 3 + i as usize, 2.5).unwrap()).collect()
}

fn index(lp: Result<peg_core::LagrangianLoop<f64>, peg_core::MaslovError>) -> Result<i64, String> {
    lp.and_then(|l| maslov_index(&l)).map_err(|e| e.to_string())
}

fn maslov_golden() -> Verdict {
    let mut curves = vec![("circle".to_string(), Curve::circle()), ("ellipse".to_string(), Curve::ellipse(2.0, 1.0))];
    for (i, c) in random_curves(5).into_iter().enumerate() {
        curves.push((format!("random-{i}"), c));
    }
    let mut checks = 0;
    for (name, curve) in &curves {
        for r in [0.1, 0.25, 0.5] {
            let w = FormWeights::pullback(r).unwrap();
            let idx = |m, n| index(torus_loop(curve, w, m, n, DEFAULT_LOOP_SAMPLES));
            let (a, b, diag) = (idx(1, 0)?, idx(0, 1)?, idx(1, 1)?);
            if (a, b, diag) != (2, 2, 4) {
                return Err(format!("{name}, r = {r}: (1,0) {a}, (0,1) {b}, diagonal {diag}"));
            }
            if minimum_maslov_number(a, b) != 2 {
                return Err(format!("{name}: m(gamma x gamma) != 2"));
            }
            for map in [TorusMap::F { r }, TorusMap::RotatedF { s: r, phi: 1.0 }] {
                let idx = |m, n| index(image_torus_loop(curve, map, m, n, DEFAULT_LOOP_SAMPLES));
                let (ia, ib, idiag) = (idx(1, 0)?, idx(0, 1)?, idx(1, 1)?);
                if idiag != 4 {
                    return Err(format!("{name}, {map:?}: image diagonal index {idiag}"));
                }
                if minimum_maslov_number(ia, ib) != 2 || minimum_maslov_number(idiag, ia) != 2 {
                    return Err(format!("{name}, {map:?}: minimum Maslov number of image torus != 2"));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{} curves x 3 weights, {checks} image tori", curves.len()))
}

fn linearity() -> Verdict {
    let curves = [Curve::circle(), Curve::ellipse(2.0, 1.0), random_curves(1).remove(0)];
    let w = FormWeights::pullback(0.25).unwrap();
    let mut count = 0;
    for curve in &curves {
        for m in -2..=2 {
            for n in -2..=2 {
                let i = index(torus_loop(curve, w, m, n, DEFAULT_LOOP_SAMPLES))?;
                if i != 2 * (m + n) {
                    return Err(format!("(m, n) = ({m}, {n}): index {i}"));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} classes"))
}

fn lemma_roundtrip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pi = std::f64::consts::PI;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s = 0.5 - rng.gen_range(0.0..0.5);
        let t = 0.5 - rng.gen_range(0.0..0.5);
        let phi = pi - rng.gen_range(0.0..pi);
        let Ok(q) = Params::new(s, t, phi) else { continue };
        let back = params_from_vertices(&vertices_from_params(&q), 1e-9).map_err(|e| format!("{q:?}: {e}"))?;
        let direct = (back.s() - s).abs().max((back.t() - t).abs()).max((back.phi() - phi).abs());
        let swapped = (back.s() - t).abs().max((back.t() - s).abs()).max((back.phi() - (pi - phi)).abs());
        let identified = if (s - 0.5).abs() < 1e-12 || (t - 0.5).abs() < 1e-12 { direct.min(swapped) } else { direct };
        worst = worst.max(identified);
    }
    if worst < 1e-12 {
        Ok(format!("max error {worst:e}"))
    } else {
        Err(format!("max error {worst:e} >= 1e-12"))
    }
}

fn chord_theorem() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tau = std::f64::consts::TAU;
    let (mut cyclic_ok, mut perturbed_ok) = (0, 0);
    let n = 10_000;
    for _ in 0..n {
        let center = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let radius = rng.gen_range(0.1..10.0);
        let mut th: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..tau)).collect();
        th.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gaps_ok = (0..4).all(|i| {
            let next = if i == 3 { th[0] + tau } else { th[i + 1] };
            next - th[i] > 1e-3
        });
        if !gaps_ok {
            th = vec![0.1, 1.7, 3.3, 4.9];
        }
        let pts = [0, 1, 2, 3].map(|i| center + Complex64::from_polar(radius, th[i]));
        if is_cyclic(&pts, 1e-9).map_err(|e| e.to_string())? {
            cyclic_ok += 1;
        }
        // Move D along the ray from the diagonal crossing by at least 1%.
        let e = pts[2] - pts[0];
        let f = pts[3] - pts[1];
        let g = pts[1] - pts[0];
        let u = (g.re * f.im - g.im * f.re) / (e.re * f.im - e.im * f.re);
        let x = pts[0] + e * u;
        let delta = rng.gen_range(0.0102..0.3);
        let factor = if rng.gen::<bool>() { 1.0 + delta } else { 1.0 - delta };
        let mut bent = pts;
        bent[3] = x + (pts[3] - x) * factor;
        if !is_cyclic(&bent, 1e-9).map_err(|e| e.to_string())? {
            perturbed_ok += 1;
        }
    }
    if cyclic_ok == n && perturbed_ok == n {
        Ok(format!("{n} concyclic pass, {n} perturbed fail"))
    } else {
        Err(format!("concyclic passing {cyclic_ok}/{n}, perturbed rejected {perturbed_ok}/{n}"))
    }
}

fn ellipse_square() -> Verdict {
    let p = Problem::new(Curve::ellipse(2.0, 1.0), Params::square(), Options::default()).map_err(|e| e.to_string())?;
    let rep = p.solve_all().map_err(|e| e.to_string())?;
    let k = 2.0 / 5f64.sqrt();
    let target = [(k, k), (-k, k), (-k, -k), (k, -k)].map(|(x, y)| Complex64::new(x, y));
    for ins in &rep.inscriptions {
        for shift in 0..4 {
            let err = (0..4).map(|i| (ins.vertices[i] - target[(i + shift) % 4]).norm()).fold(0.0, f64::max);
            if err < 1e-8 {
                return Ok(format!("vertex error {err:e} among {} inscriptions", rep.inscriptions.len()));
            }
        }
    }
    Err(format!("no inscription within 1e-8 of the (+-k, +-k) square ({} found)", rep.inscriptions.len()))
}

fn jacobian_check() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for curve in random_curves(5) {
        let q = Params::new(rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5), rng.gen_range(0.1..3.0)).unwrap();
        let p = Problem::new(curve, q, Options::default()).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            let jac = p.jacobian(&x);
            for col in 0..4 {
                let (mut xp, mut xm) = (x, x);
                xp[col] += h;
                xm[col] -= h;
                let (rp, rm) = (p.residual(&xp), p.residual(&xm));
                for row in 0..4 {
                    worst = worst.max((jac[row][col] - (rp[row] - rm[row]) / (2.0 * h)).abs());
                }
            }
        }
    }
    if worst < 1e-6 {
        Ok(format!("max deviation {worst:e}"))
    } else {
        Err(format!("max deviation {worst:e} >= 1e-6"))
    }
}

fn circle_family() -> Verdict {
    let mut reseeds = 0;
    // The solver tolerance is relative to the diameter (2 here); the
    // criterion is an absolute 1e-11.
    let options = Options { newton_tol: 0.5e-11, ..Options::default() };
    for q in [Params::square(), Params::new(0.2, 0.45, 0.7).unwrap()] {
        let p = Problem::new(Curve::circle(), q, options).map_err(|e| e.to_string())?;
        let rep = p.solve_all().map_err(|e| e.to_string())?;
        if rep.is_none_found() {
            return Err(format!("{q:?}: none found"));
        }
        for ins in &rep.inscriptions {
            for h in [0.1, 0.2, 0.3] {
                let again = p.newton_refine(&ins.params.map(|a| a + h)).map_err(|e| format!("{q:?}, h = {h}: {e}"))?;
                if !(again.residual_norm < 1e-11) {
                    return Err(format!("residual {:e}", again.residual_norm));
                }
                reseeds += 1;
            }
        }
    }
    Ok(format!("{reseeds} shifted reseeds reconverged"))
}

fn umlaufsatz(corpus: &Corpus) -> Verdict {
    for (i, path) in corpus.curves.iter().enumerate() {
        let c = load(path);
        let n = 4 * c.default_validation_samples();
        for samples in [n, 2 * n] {
            let k = c.turning_number(samples).map_err(|e| format!("curve {i}: {e}"))?;
            if k != 1 {
                return Err(format!("curve {i}: turning number {k}"));
            }
        }
    }
    Ok(format!("{} corpus curves", corpus.curves.len()))
}

fn main() {
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut report = |name: &'static str, v: Verdict| {
        match &v {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => println!("[FAIL] {name}: {msg}"),
        }
        results.push((name, v));
    };

    let dir = tempfile::tempdir().expect("temp dir");
    let corpus = write_corpus(dir.path());

    let first = corpus.as_ref().map_err(Clone::clone).and_then(|c| solve_corpus(c, 1, true));
    report(
        "theorem at desk scale (500 instances, residual < 1e-9 * diameter, < 10 min)",
        match &first {
            Ok((_, elapsed)) if *elapsed < CORPUS_TIME_LIMIT => Ok(format!("{:.1} s", elapsed.as_secs_f64())),
            Ok((_, elapsed)) => Err(format!("took {:.1} s", elapsed.as_secs_f64())),
            Err(e) => Err(e.clone()),
        },
    );
    report("maslov golden values", maslov_golden());
    report("linearity of the index in the class", linearity());
    report("parameter roundtrip (1e4 triples, < 1e-12)", lemma_roundtrip());
    report("chord theorem (1e4 concyclic, 1e4 perturbed)", chord_theorem());
    report("square inscribed in ellipse(2, 1)", ellipse_square());
    report("analytic jacobian vs central differences", jacobian_check());
    report("circle rotational family", circle_family());
    report(
        "turning number +1 on corpus",
        corpus.as_ref().map_err(Clone::clone).and_then(umlaufsatz),
    );

    let determinism = (|| -> Verdict {
        let corpus = corpus.as_ref().map_err(Clone::clone)?;
        let (first, _) = first.as_ref().map_err(Clone::clone)?;
        let regen_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let again = write_corpus(regen_dir.path())?;
        for (a, b) in corpus.curves.iter().zip(&again.curves) {
            if fs::read(a).unwrap() != fs::read(b).unwrap() {
                return Err(format!("{} regenerated differently", a.display()));
            }
        }
        let (second, _) = solve_corpus(&again, 4, false)?;
        let differing = first.iter().zip(&second).filter(|(a, b)| a != b).count();
        if differing == 0 {
            Ok(format!("{} outputs identical with --workers 1 and --workers 4", first.len()))
        } else {
            Err(format!("{differing} outputs differ"))
        }
    })();
    report("determinism across runs and worker counts", determinism);

    let failed = results.iter().filter(|(_, v)| v.is_err()).count();
    println!("{} criteria, {} passed, {} failed", results.len(), results.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
