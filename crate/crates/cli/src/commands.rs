use std::fs;
use std::io::Write;
use std::path::Path;

use peg_core::maslov::{image_torus_loop, maslov_index, torus_loop};
use peg_core::{
    Curve, CurveKind, FormWeights, MaslovError, Options, Problem, SolverError, TorusMap, ValidationOptions, WindingError,
};

use crate::args::{Cli, Command, GenCurveArgs, Kind, MaslovArgs, SolveArgs};
use crate::{quadspec, render, EXIT_INVALID, EXIT_NONE_FOUND, EXIT_OK, EXIT_RESOLUTION};

/// A failed command: exit code and message for the error stream.
struct Failure(u8, String);

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EXIT_INVALID, msg.into())
}

type Outcome = Result<(), Failure>;

pub fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let res = match cli.command {
        Command::Solve(a) => solve(&a, out, err),
        Command::Params { coords, cyclic_tol } => params(&coords, cyclic_tol, out),
        Command::Vertices { params } => vertices(&params, out),
        Command::Maslov(a) => maslov(&a, out),
        Command::GenCurve(a) => gen_curve(&a, out),
        Command::Render {
            curve,
            inscriptions,
            out: path,
        } => render_cmd(&curve, &inscriptions, path.as_deref(), out),
        Command::Validate { curve } => validate(&curve, out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn read_curve(path: &Path) -> Result<Curve, Failure> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Curve::parse_file(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(|e| invalid(format!("stdout: {e}"))),
    }
}

fn curve_check_message(immersed: bool, embedded: bool) -> String {
    let mut failed = Vec::new();
    if !immersed {
        failed.push("immersion (tangent vanishes)");
    }
    if !embedded {
        failed.push("embeddedness (curve meets itself)");
    }
    format!("invalid curve: failed {}", failed.join(" and "))
}

fn solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let curve = read_curve(&a.curve)?;
    let q = quadspec::parse(&a.quad, 1e-9).map_err(|e| invalid(format!("quadrilateral: {e}")))?;
    let opts = Options {
        grid: a.grid,
        newton_tol: a.newton_tol,
        max_iter: a.max_iter,
        dedup_tol: a.dedup_tol,
        degen_tol: a.degen_tol,
        workers: a.workers,
    };
    let problem = Problem::new(curve, q, opts).map_err(|e| match e {
        SolverError::InvalidCurve(r) => invalid(curve_check_message(r.immersed, r.embedded)),
        other => invalid(other.to_string()),
    })?;
    let report = problem.solve_all().map_err(|e| invalid(e.to_string()))?;
    if report.is_none_found() {
        let d = report.diagnostics;
        let _ = writeln!(
            err,
            "no inscription found: {} seeds, {} converged, {} degenerate, {} not converged, {} singular, {} rejected; try a denser --grid",
            d.seeds, d.converged, d.degenerate, d.no_convergence, d.singular, d.rejected
        );
        return Err(Failure(EXIT_NONE_FOUND, "none found".into()));
    }
    let mut text = String::new();
    for ins in &report.inscriptions {
        text.push_str(&ins.to_line());
        text.push('\n');
    }
    emit(text.as_bytes(), a.out.as_deref(), out)
}

fn params(coords: &[String], tol: f64, out: &mut dyn Write) -> Outcome {
    let v = quadspec::numbers(coords).map_err(|e| invalid(e.to_string()))?;
    if v.len() != 8 {
        return Err(invalid(format!("expected 8 vertex coordinates, got {}", v.len())));
    }
    let q = quadspec::parse(coords, tol).map_err(|e| invalid(e.to_string()))?;
    emit(format!("{}\n", quadspec::format_params(&q)).as_bytes(), None, out)
}

fn vertices(params: &[String], out: &mut dyn Write) -> Outcome {
    let v = quadspec::numbers(params).map_err(|e| invalid(e.to_string()))?;
    if v.len() != 3 {
        return Err(invalid(format!("expected s t phi, got {} numbers", v.len())));
    }
    let q = quadspec::parse(params, 0.0).map_err(|e| invalid(e.to_string()))?;
    emit(format!("{}\n", quadspec::format_vertices(&q)).as_bytes(), None, out)
}

fn parse_map(spec: &str) -> Result<TorusMap<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| invalid(format!("--map: bad number {s:?}")));
    match parts.as_slice() {
        ["ft", t] => Ok(TorusMap::F { r: num(t)? }),
        ["rfs", s, phi] => Ok(TorusMap::RotatedF {
            s: num(s)?,
            phi: num(phi)?,
        }),
        _ => Err(invalid(format!("--map: expected \"ft:T\" or \"rfs:S:PHI\", got {spec:?}"))),
    }
}

fn maslov(a: &MaslovArgs, out: &mut dyn Write) -> Outcome {
    let curve = read_curve(&a.curve)?;
    let report = curve.validate(&ValidationOptions::for_curve(&curve));
    if !report.is_valid() {
        return Err(invalid(curve_check_message(report.immersed, report.embedded)));
    }
    let built = match &a.map {
        Some(spec) => image_torus_loop(&curve, parse_map(spec)?, a.m, a.n, a.samples),
        None => {
            let r = a.weights.unwrap_or(0.5);
            if !(r > 0.0 && r <= 0.5) {
                return Err(invalid(format!("--weights: r = {r} outside (0, 1/2]")));
            }
            FormWeights::pullback(r).and_then(|w| torus_loop(&curve, w, a.m, a.n, a.samples))
        }
    };
    match built.and_then(|lp| maslov_index(&lp)) {
        Ok(index) => emit(format!("{index}\n").as_bytes(), None, out),
        Err(MaslovError::Winding(e @ (WindingError::Resolution { .. } | WindingError::TooFewSamples))) => Err(
            Failure(EXIT_RESOLUTION, format!("{e}; rerun with a larger --samples (now {})", a.samples)),
        ),
        Err(e) => Err(invalid(e.to_string())),
    }
}

fn gen_curve(a: &GenCurveArgs, out: &mut dyn Write) -> Outcome {
    let kind = match a.kind {
        Kind::Circle => CurveKind::Circle,
        Kind::Ellipse => CurveKind::Ellipse { a: a.a, b: a.b },
        Kind::Random => CurveKind::Random,
    };
    let curve = Curve::generate(kind, a.seed, a.k_max, a.decay).map_err(|e| invalid(e.to_string()))?;
    emit(curve.to_file_string().as_bytes(), a.out.as_deref(), out)
}

fn render_cmd(curve: &Path, list: &Path, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let curve = read_curve(curve)?;
    let text = fs::read_to_string(list).map_err(|e| invalid(format!("{}: {e}", list.display())))?;
    let ins = render::parse_inscription_lines(&text).map_err(|e| invalid(format!("{}: {e}", list.display())))?;
    emit(render::render_svg(&curve, &ins).as_bytes(), path, out)
}

fn validate(path: &Path, out: &mut dyn Write) -> Outcome {
    let curve = read_curve(path)?;
    let r = curve.validate(&ValidationOptions::for_curve(&curve));
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    let mut text = format!(
        "samples {}\ndiameter {}\nmin_speed {}\nclosest_approach {}\nimmersion {}\nembeddedness {}\n",
        r.n_samples,
        r.diameter,
        r.min_speed,
        r.closest_approach,
        verdict(r.immersed),
        verdict(r.embedded)
    );
    if r.immersed {
        match curve.turning_number(4 * r.n_samples) {
            Ok(k) => text.push_str(&format!("turning_number {k}\n")),
            Err(e) => text.push_str(&format!("turning_number error: {e}\n")),
        }
    }
    emit(text.as_bytes(), None, out)?;
    if r.is_valid() {
        Ok(())
    } else {
        Err(invalid(curve_check_message(r.immersed, r.embedded)))
    }
}
