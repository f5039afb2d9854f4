//! One function per subcommand. Each reads its input object from the job.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use hypam::export::{read_ply, write_csv, write_ply};
use hypam::line::{classify_line_tol, max_defect, sample_line_amoeba};
use hypam::surface::{convexity_check, critical_report, gauss_left_tol, membership, MembershipOpts};
use hypam::tropical::{build_theta, kappa_convergence_check, pencil_family};
use hypam::{
    sample, AbsPoint, CP1Point, FloorDiagram, HPoint, Line, LineAmoebaClass, ProjPoint, RationalCurve, Side, Surface, Tolerances,
    TropicalCurveGraph,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::job::{Job, Outcome};

pub const COMMANDS: [&str; 12] = [
    "line-classify",
    "line-sample",
    "curve-gauss",
    "curve-critical",
    "surface-member",
    "surface-convexity",
    "surface-fill",
    "surface-gauss",
    "trop-validate",
    "trop-theta",
    "trop-converge",
    "export",
];

const DEFECT_TOL: f64 = 1e-6;

pub fn dispatch(command: &str, job: &Job) -> anyhow::Result<Outcome> {
    let tol = job.tolerances()?;
    match command {
        "line-classify" => line_classify(job, &tol),
        "line-sample" => line_sample(job, &tol),
        "curve-gauss" => curve_gauss(job),
        "curve-critical" => curve_critical(job, &tol),
        "surface-member" => surface_member(job, &tol),
        "surface-convexity" => surface_convexity(job, &tol),
        "surface-fill" => surface_fill(job, &tol),
        "surface-gauss" => surface_gauss(job, &tol),
        "trop-validate" => trop_validate(job),
        "trop-theta" => trop_theta(job),
        "trop-converge" => trop_converge(job, &tol),
        "export" => export(job),
        _ => bail!("unknown command {command}"),
    }
}

fn write_artifact(path: &Path, points: &[[f64; 3]], pieces: Option<&[u32]>) -> anyhow::Result<String> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("ply") => write_ply(&mut w, points, pieces)?,
        Some("csv") => write_csv(&mut w, points, pieces)?,
        _ => bail!("artifact {} must end in .ply or .csv", path.display()),
    }
    w.flush()?;
    Ok(path.display().to_string())
}

/// Labels of an unordered boundary pair, sorted.
fn labels(pair: &(AbsPoint, AbsPoint)) -> [String; 2] {
    let mut l = [pair.0.label(), pair.1.label()];
    l.sort();
    l
}

fn class_summary(out: &mut Outcome, class: &LineAmoebaClass) -> anyhow::Result<()> {
    out.put("class", class.name())?;
    match class {
        LineAmoebaClass::EmptyPlusRuling { point } => out.put("point", point.label())?,
        LineAmoebaClass::EmptyMinusRuling => {}
        LineAmoebaClass::Horosphere { center, basepoint } => {
            out.put("center", center.label())?;
            out.put("basepoint", basepoint)?;
        }
        LineAmoebaClass::Cylinder { axis, radius } => {
            out.put("axis", labels(axis))?;
            out.put("radius", radius)?;
        }
        LineAmoebaClass::Geodesic { endpoints } => out.put("endpoints", labels(endpoints))?,
    }
    out.put("detail", class)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LineInput {
    line: Line,
}

fn line_classify(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let LineInput { line } = job.input()?;
    let class = classify_line_tol(&line, tol)?;
    let mut out = Outcome::default();
    class_summary(&mut out, &class)?;
    if !matches!(class, LineAmoebaClass::EmptyPlusRuling { .. } | LineAmoebaClass::EmptyMinusRuling) {
        let d = max_defect(&line, &class, job.count.unwrap_or(16), job.seed.unwrap_or(0))?;
        out.residual("max_defect", d);
        out.verdict("on_level_set", d < DEFECT_TOL);
    }
    Ok(out)
}

fn line_sample(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let seed = job.require_seed()?;
    let LineInput { line } = job.input()?;
    let class = classify_line_tol(&line, tol)?;
    let cloud = sample_line_amoeba(&line, job.count.unwrap_or(256), seed)?;
    let mut out = Outcome::default();
    class_summary(&mut out, &class)?;
    out.put("points", cloud.points.len())?;
    out.put("generator", &cloud.generator)?;
    let mut worst = 0.0f64;
    for x in &cloud.points {
        worst = worst.max(class.defect(x)?.abs());
    }
    out.residual("max_defect", worst);
    out.verdict("on_level_set", worst < DEFECT_TOL);
    if let Some(path) = &job.artifact {
        let pts: Vec<[f64; 3]> = cloud.points.iter().map(|x| x.to_ball().v).collect();
        out.artifacts.push(write_artifact(path, &pts, None)?);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussInput {
    curve: RationalCurve,
    #[serde(default = "minus")]
    side: Side,
    #[serde(default)]
    params: Vec<CP1Point>,
}

fn minus() -> Side {
    Side::Minus
}

fn curve_gauss(job: &Job) -> anyhow::Result<Outcome> {
    let GaussInput { curve, side, params } = job.input()?;
    let mut out = Outcome::default();
    out.put("side", side)?;
    out.put("curve_degree", curve.degree())?;
    out.put("gauss_degree", curve.gauss_degree_estimate(side)?)?;
    let values = params.iter().map(|z| curve.gauss(z, side)).collect::<hypam::Result<Vec<_>>>()?;
    let roots: Vec<[String; 2]> = values.iter().map(|g| g.roots().map(|r| r.label())).collect();
    out.put("values", &values)?;
    out.put("roots", roots)?;
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CriticalInput {
    curve: RationalCurve,
    #[serde(default = "default_grid")]
    grid: usize,
}

fn default_grid() -> usize {
    512
}

fn curve_critical(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let CriticalInput { curve, grid } = job.input()?;
    let crit = curve.critical_params(grid, tol.tol_crit);
    let mut out = Outcome::default();
    out.put("grid", grid)?;
    out.put("critical_count", crit.len())?;
    out.put("critical_labels", crit.iter().map(|z| z.label()).collect::<Vec<_>>())?;
    out.put("critical", &crit)?;
    let mut worst = 0.0f64;
    for z in &crit {
        worst = worst.max(curve.jacobian_ratio(z)?);
    }
    out.residual("max_jacobian_ratio", worst);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberInput {
    surface: Surface,
    point: HPoint,
}

fn member_opts(job: &Job, tol: &Tolerances, seed: u64) -> MembershipOpts {
    MembershipOpts { starts: job.starts.unwrap_or(MembershipOpts::default().starts), tau: tol.tau_member, seed }
}

fn surface_member(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let seed = job.require_seed()?;
    let MemberInput { surface, point } = job.input()?;
    let res = membership(&surface, &point, &member_opts(job, tol, seed))?;
    let mut out = Outcome::default();
    out.put("member", res.member)?;
    out.put("witness", res.witness)?;
    out.put("starts", res.starts)?;
    out.residual("min_value", res.min_value);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvexityInput {
    surface: Surface,
    #[serde(default = "default_pairs")]
    pairs: usize,
    #[serde(default = "default_steps")]
    steps: usize,
}

fn default_pairs() -> usize {
    50
}

fn default_steps() -> usize {
    20
}

fn surface_convexity(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let seed = job.require_seed()?;
    let ConvexityInput { surface, pairs, steps } = job.input()?;
    let rep = convexity_check(&surface, pairs, steps, seed, &member_opts(job, tol, seed))?;
    let mut out = Outcome::default();
    out.put("pairs", rep.pairs)?;
    out.put("steps", rep.steps)?;
    out.put("violations", rep.violations)?;
    out.put("rejections", rep.rejections)?;
    out.put("endpoint_failures", rep.endpoint_failures)?;
    out.residual("min_margin", rep.min_margin);
    out.verdict("convex", rep.violations == 0);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FillInput {
    surface: Surface,
    #[serde(default = "default_rmax")]
    rmax: f64,
}

fn default_rmax() -> f64 {
    3.0
}

fn surface_fill(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let seed = job.require_seed()?;
    let FillInput { surface, rmax } = job.input()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = job.count.unwrap_or(50);
    let (mut misses, mut worst) = (Vec::new(), 0.0f64);
    for k in 0..n {
        let x = sample::hpoint(&mut rng, rmax);
        let res = membership(&surface, &x, &member_opts(job, tol, seed.wrapping_add(k as u64)))?;
        worst = worst.max(res.min_value);
        if !res.member {
            misses.push(x);
        }
    }
    let mut out = Outcome::default();
    out.put("points", n)?;
    out.put("odd_degree", surface.degree() % 2 == 1)?;
    out.put("non_members", &misses)?;
    out.residual("max_min_value", worst);
    out.verdict("filled", misses.is_empty());
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceGaussInput {
    surface: Surface,
    point: ProjPoint,
}

fn surface_gauss(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let SurfaceGaussInput { surface, point } = job.input()?;
    let g = gauss_left_tol(&surface, &point, tol)?;
    let rep = critical_report(&surface, &point, tol)?;
    let mut out = Outcome::default();
    out.put("gauss", g)?;
    out.put("roots", g.roots().map(|r| r.label()))?;
    out.put("gauss_critical", rep.gauss_critical)?;
    out.put("jacobian_critical", rep.jacobian_critical)?;
    out.residual("surface_residual", surface.residual(&point));
    out.residual("real_dist", rep.real_dist);
    out.residual("jacobian_ratio", rep.jacobian_ratio);
    out.verdict("detectors_agree", rep.gauss_critical == rep.jacobian_critical);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TropInput {
    diagram: Option<FloorDiagram>,
    graph: Option<TropicalCurveGraph>,
}

fn trop_validate(job: &Job) -> anyhow::Result<Outcome> {
    let mut out = Outcome::default();
    match job.input()? {
        TropInput { diagram: Some(d), graph: None } => {
            let v = d.validate();
            out.put("kind", "floor_diagram")?;
            out.verdict("valid", v.is_empty());
            out.put("violations", v)?;
        }
        TropInput { diagram: None, graph: Some(g) } => {
            let v = g.validate();
            out.put("kind", "tropical_curve")?;
            out.put("tropical_degree", g.tropical_degree())?;
            out.verdict("valid", v.is_empty());
            out.put("violations", v)?;
        }
        _ => bail!("input needs exactly one of diagram, graph"),
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramInput {
    diagram: FloorDiagram,
}

fn trop_theta(job: &Job) -> anyhow::Result<Outcome> {
    let DiagramInput { diagram } = job.input()?;
    let theta = build_theta(&diagram)?;
    let cloud = theta.sample(job.density.unwrap_or(10_000));
    let mut worst = 0.0f64;
    for (p, tag) in cloud.points.iter().zip(&cloud.pieces) {
        worst = worst.max(theta.pieces[*tag as usize].distance(&p.v));
    }
    let mut out = Outcome::default();
    out.put("pieces", &theta.pieces)?;
    out.put("points", cloud.points.len())?;
    out.residual("max_piece_distance", worst);
    if let Some(path) = &job.artifact {
        let pts: Vec<[f64; 3]> = cloud.points.iter().map(|p| p.v).collect();
        out.artifacts.push(write_artifact(path, &pts, Some(&cloud.pieces))?);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvergeInput {
    diagram: FloorDiagram,
    pencil: [ProjPoint; 2],
    log_t: Vec<f64>,
}

fn trop_converge(job: &Job, tol: &Tolerances) -> anyhow::Result<Outcome> {
    let seed = job.require_seed()?;
    let ConvergeInput { diagram, pencil, log_t } = job.input()?;
    let density = job.density.unwrap_or(10_000);
    let pts = pencil_family(pencil[0].entries(), pencil[1].entries(), job.count.unwrap_or(density), seed);
    let schedule: Vec<f64> = log_t.iter().map(|s| s.exp()).collect();
    let rep = kappa_convergence_check(|_| Ok(pts.clone()), &diagram, &schedule, density, tol.tol_conv)?;
    let mut out = Outcome::default();
    out.put("log_t", &rep.log_t)?;
    out.put("distances", &rep.distances)?;
    out.put("monotone", rep.monotone)?;
    out.put("eventually_decreasing", rep.eventually_decreasing)?;
    out.residual("final_distance", rep.final_distance);
    out.verdict("converges", rep.passed);
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportInput {
    from: Option<String>,
    points: Option<Vec<[f64; 3]>>,
    pieces: Option<Vec<u32>>,
}

fn export(job: &Job) -> anyhow::Result<Outcome> {
    let Some(target) = &job.artifact else { bail!("export needs an artifact path") };
    let (points, pieces) = match job.input()? {
        ExportInput { from: Some(p), points: None, pieces: None } => {
            let f = File::open(&p).with_context(|| format!("opening {p}"))?;
            read_ply(BufReader::new(f))?
        }
        ExportInput { from: None, points: Some(pts), pieces } => (pts, pieces),
        _ => bail!("input needs either from or points"),
    };
    if pieces.as_ref().is_some_and(|t| t.len() != points.len()) {
        bail!("pieces and points differ in length");
    }
    let mut out = Outcome::default();
    out.put("points", points.len())?;
    out.artifacts.push(write_artifact(target, &points, pieces.as_deref())?);
    Ok(out)
}
