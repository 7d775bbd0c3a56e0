use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{parse_disk, parse_points, parse_viewport, ConfigFile, ViewportConfig, VIEWPORT_DEFAULT};
use super::mapspec::MapSpec;
use super::report::{ReportDocument, Section};
use super::{CliError, Format, Mode, Options, ProbeKind};
use crate::boettcher::{
    boettcher_milnor, boettcher_original, boettcher_ritt, boettcher_series, ChartSummary, CoordinateChart,
    N_MAX_DEFAULT, N_TERMS_DEFAULT,
};
use crate::fixedpoints::{periodic_cycles, Cycle, NonRepellingReport, MAX_PERIOD_DEFAULT};
use crate::julia::{
    default_escape_radius, escape_time_raster, flags_non_normality, inverse_iteration, marty_diagnostic,
    transitivity_probe, Cell, Palette, RasterGrid, Region, Viewport, INVERSE_CAP_DEFAULT, MARTY_THRESHOLD,
    MAX_ITER_DEFAULT,
};
use crate::maps::{RationalMap, SpherePoint};
use crate::newton::{cayley_check, newton_raster, NEWTON_MAX_ITER_DEFAULT, NEWTON_TOLERANCE_DEFAULT};

/// Functional-equation residual a Boettcher chart must meet at a sample.
pub const BOETTCHER_RESIDUAL: f64 = 1e-9;
const MARTY_N_MAX_DEFAULT: usize = 25;
const TRANSITIVITY_N_MAX_DEFAULT: usize = 20;
const INVERSE_DEPTH_DEFAULT: usize = 8;
const DEFAULT_SAMPLES: usize = 8;

/// Command settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub map_text: String,
    pub spec: MapSpec,
    pub method: String,
    pub max_period: usize,
    pub viewport: ViewportConfig,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub mode: Mode,
    pub points: Option<Vec<SpherePoint>>,
    pub center: String,
    pub max_iter: Option<u32>,
    pub escape_radius: Option<f64>,
    pub tol: f64,
    pub depth: usize,
    pub cap: usize,
    pub n_max: Option<usize>,
    pub n_terms: usize,
    pub kind: ProbeKind,
    pub region: (Complex64, f64),
    pub target: Option<(Complex64, f64)>,
    pub timing: bool,
}

impl Settings {
    pub fn resolve(o: &Options) -> Result<Self, CliError> {
        let file = match &o.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let map_text: String = file
            .pick("map", o.map.clone())?
            .ok_or_else(|| CliError::Usage("--map is required (flag or config key)".into()))?;
        let spec = MapSpec::parse(&map_text)?;
        let viewport_text: String = file
            .pick("viewport", o.viewport.clone())?
            .unwrap_or_else(|| VIEWPORT_DEFAULT.to_string());
        let (center, half_width, cols, rows) = parse_viewport(&viewport_text)?;
        let palette: String = file.pick("palette", o.palette.clone())?.unwrap_or_else(|| "hue".into());
        let seed: u64 = file.pick("seed", o.seed)?.unwrap_or(0);
        let points = match file.pick::<String>("points", o.points.clone())? {
            Some(s) => Some(parse_points(&s)?),
            None => None,
        };
        let region = match file.pick::<String>("region", o.region.clone())? {
            Some(s) => parse_disk(&s)?,
            None => (Complex64::new(0.0, 0.0), 0.5),
        };
        let target = match file.pick::<String>("target", o.target.clone())? {
            Some(s) => Some(parse_disk(&s)?),
            None => None,
        };
        Ok(Self {
            map_text,
            spec,
            method: file.pick("method", o.method.clone())?.unwrap_or_else(|| "all".into()),
            max_period: file.pick("max-period", o.max_period)?.unwrap_or(MAX_PERIOD_DEFAULT),
            viewport: ViewportConfig {
                center,
                half_width,
                cols,
                rows,
                palette,
                seed,
            },
            out: file.pick("out", o.out.clone())?,
            format: file.pick("format", o.format)?,
            mode: file.pick("mode", o.mode)?.unwrap_or(Mode::Escape),
            points,
            center: file.pick("center", o.center.clone())?.unwrap_or_else(|| "auto".into()),
            max_iter: file.pick("max-iter", o.max_iter)?,
            escape_radius: file.pick("escape-radius", o.escape_radius)?,
            tol: file.pick("tol", o.tol)?.unwrap_or(NEWTON_TOLERANCE_DEFAULT),
            depth: file.pick("depth", o.depth)?.unwrap_or(INVERSE_DEPTH_DEFAULT),
            cap: file.pick("cap", o.cap)?.unwrap_or(INVERSE_CAP_DEFAULT),
            n_max: file.pick("n-max", o.n_max)?,
            n_terms: file.pick("n-terms", o.n_terms)?.unwrap_or(N_TERMS_DEFAULT),
            kind: file.pick("kind", o.kind)?.unwrap_or(ProbeKind::Marty),
            region,
            target,
            timing: o.timing,
        })
    }

    fn map(&self) -> Result<RationalMap, CliError> {
        Ok(self.spec.to_map()?)
    }

    fn report(&self, command: &'static str, f: &RationalMap) -> ReportDocument {
        ReportDocument::new(command, self.spec.describe(&self.map_text, f))
    }

    fn require_format(&self, allowed: Format) -> Result<(), CliError> {
        match self.format {
            Some(f) if f != allowed => Err(CliError::Usage(format!(
                "this command writes {allowed:?} output, not {f:?}"
            ))),
            _ => Ok(()),
        }
    }
}

/// A file written next to the report (image or point cloud).
#[derive(Debug, Clone)]
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: ReportDocument,
    pub artifact: Option<Artifact>,
}

impl Outcome {
    fn report_only(report: ReportDocument) -> Self {
        Self { report, artifact: None }
    }

    /// Artifacts go to their path with the report as a `.json` sidecar;
    /// plain reports go to `--out` or stdout.
    pub fn write(&self, settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
        let json = self.report.to_json();
        if let Some(a) = &self.artifact {
            std::fs::write(&a.path, &a.bytes).map_err(|e| CliError::io(&a.path, e))?;
            let sidecar = a.path.with_extension("json");
            std::fs::write(&sidecar, json).map_err(|e| CliError::io(&sidecar, e))?;
            return Ok(());
        }
        match &settings.out {
            Some(path) => std::fs::write(path, json).map_err(|e| CliError::io(path, e)),
            None => stdout
                .write_all(json.as_bytes())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e)),
        }
    }
}

#[derive(Serialize)]
struct MapSection {
    degree: usize,
    polynomial: bool,
    critical_points: Vec<SpherePoint>,
}

#[derive(Serialize)]
struct CycleSection {
    max_period: usize,
    count: usize,
    cycles: Vec<Cycle>,
}

pub fn cmd_classify(s: &Settings) -> Result<Outcome, CliError> {
    s.require_format(Format::Json)?;
    let f = s.map()?;
    let mut report = s.report("classify", &f);
    let d = f.degree();
    if d >= 2 {
        match f.critical_points() {
            Ok(critical_points) => report.push(Section::ok(
                "map",
                MapSection {
                    degree: d,
                    polynomial: f.is_polynomial(),
                    critical_points,
                },
            )),
            Err(e) => report.push(Section::flagged("map", e.to_string(), ())),
        }
    }
    if let Some(m) = s.spec.moebius() {
        let m = m?;
        let (p, q) = m.fixed_points();
        report.push(Section::ok(
            "moebius",
            serde_json::json!({
                "classification": m.classify(),
                "fixed_points": [p, q],
                "trace_squared_over_det": m.trace() * m.trace() / m.det(),
            }),
        ));
    }
    // the symbolic degree cap may rule out the longest periods; fall back
    // to the longest period that can be enumerated and flag the gap
    let mut found = None;
    let mut failure = None;
    for n in (1..=s.max_period).rev() {
        match periodic_cycles(&f, n) {
            Ok(cycles) => {
                found = Some((n, cycles));
                break;
            }
            Err(e) => {
                failure.get_or_insert_with(|| format!("period {}: {e}", n));
            }
        }
    }
    let (reached, cycles) = found.unwrap_or((0, Vec::new()));
    let data = CycleSection {
        max_period: reached,
        count: cycles.len(),
        cycles: cycles.clone(),
    };
    report.push(match &failure {
        None => Section::ok("cycles", data),
        Some(reason) => Section::flagged("cycles", reason.clone(), data),
    });
    if d >= 2 && reached > 0 {
        let non_repelling: Vec<Cycle> = cycles.into_iter().filter(|c| !c.class.is_repelling()).collect();
        let bound = 2 * d - 2;
        let r = NonRepellingReport {
            count: non_repelling.len(),
            bound,
            within_bound: non_repelling.len() <= bound,
            max_period: reached,
            cycles: non_repelling,
        };
        report.push(if r.within_bound {
            Section::ok("non-repelling", r)
        } else {
            Section::flagged("non-repelling", "count exceeds 2d-2", r)
        });
    }
    Ok(Outcome::report_only(report))
}

fn parse_center(text: &str) -> Result<SpherePoint, CliError> {
    if text == "inf" {
        return Ok(SpherePoint::Infinity);
    }
    super::mapspec::parse_complex(text)
        .map(SpherePoint::Finite)
        .ok_or_else(|| CliError::Usage(format!("center '{text}' is not a complex number, 'inf' or 'auto'")))
}

/// Superattracting fixed point nearest to `near` (infinity when no hint).
fn auto_center(f: &RationalMap, near: Option<SpherePoint>) -> Result<SpherePoint, CliError> {
    let fixed = periodic_cycles(f, 1)?;
    let candidates: Vec<SpherePoint> = fixed
        .iter()
        .filter(|c| c.multiplier.norm() < crate::fixedpoints::SUPERATTRACTING_TOLERANCE)
        .map(|c| c.points[0])
        .collect();
    let near = near.unwrap_or(SpherePoint::Infinity);
    candidates
        .into_iter()
        .min_by(|a, b| a.chordal(&near).total_cmp(&b.chordal(&near)))
        .ok_or_else(|| CliError::Numeric(crate::error::Error::InvalidInput("map has no superattracting fixed point".into())))
}

#[derive(Serialize)]
struct SampleRow {
    point: SpherePoint,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ChartSection {
    chart: ChartSummary,
    tolerance: f64,
    samples: Vec<SampleRow>,
}

#[derive(Serialize)]
struct CrossRow {
    point: SpherePoint,
    methods: Vec<&'static str>,
    max_difference: f64,
}

pub fn cmd_boettcher(s: &Settings) -> Result<Outcome, CliError> {
    s.require_format(Format::Json)?;
    let f = s.map()?;
    let mut report = s.report("boettcher", &f);
    let hint = s.points.as_ref().and_then(|p| p.first().copied());
    let x = match s.center.as_str() {
        "auto" => auto_center(&f, hint)?,
        other => parse_center(other)?,
    };
    let n_max = s.n_max.unwrap_or(N_MAX_DEFAULT);
    let methods: Vec<&str> = match s.method.as_str() {
        "all" if x.is_infinite() && f.is_polynomial() => vec!["ritt", "milnor", "series", "original"],
        "all" => vec!["ritt", "series", "original"],
        m @ ("ritt" | "milnor" | "series" | "original") => vec![m],
        other => {
            return Err(CliError::Usage(format!(
                "unknown method '{other}' (expected ritt, milnor, series, original or all)"
            )))
        }
    };
    let mut charts: Vec<CoordinateChart> = Vec::new();
    for m in &methods {
        let built = match *m {
            "ritt" => boettcher_ritt(&f, x, n_max),
            "milnor" => boettcher_milnor(&f, n_max),
            "series" => boettcher_series(&f, x, s.n_terms),
            _ => boettcher_original(&f, x, n_max),
        };
        match built {
            Ok(c) => charts.push(c),
            Err(e) => report.push(Section::flagged(format!("chart-{m}"), e.to_string(), ())),
        }
    }
    let points: Vec<SpherePoint> = match &s.points {
        Some(p) => p.clone(),
        None => charts
            .iter()
            .min_by(|a, b| a.validity_radius.total_cmp(&b.validity_radius))
            .map(|c| c.samples(DEFAULT_SAMPLES, 0.5))
            .unwrap_or_default(),
    };
    for chart in &charts {
        let mut worst: f64 = 0.0;
        let samples: Vec<SampleRow> = points
            .iter()
            .map(|&z| match chart.eval(z).and_then(|v| chart.residual(&f, z).map(|r| (v, r))) {
                Ok((v, r)) => {
                    worst = worst.max(r);
                    SampleRow {
                        point: z,
                        value: Some(v),
                        residual: Some(r),
                        error: None,
                    }
                }
                Err(e) => SampleRow {
                    point: z,
                    value: None,
                    residual: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        let data = ChartSection {
            chart: chart.summary(),
            tolerance: BOETTCHER_RESIDUAL,
            samples,
        };
        let name = format!("chart-{}", chart.method.name());
        report.push(if worst < BOETTCHER_RESIDUAL {
            Section::ok(name, data)
        } else {
            Section::flagged(name, format!("residual {worst:e} exceeds {BOETTCHER_RESIDUAL:e}"), data)
        });
    }
    if charts.len() > 1 {
        let rows: Vec<CrossRow> = points
            .iter()
            .map(|&z| {
                let values: Vec<(&'static str, Complex64)> = charts
                    .iter()
                    .filter_map(|c| c.eval(z).ok().map(|v| (c.method.name(), v)))
                    .collect();
                let mut max_difference: f64 = 0.0;
                for (i, a) in values.iter().enumerate() {
                    for b in &values[i + 1..] {
                        max_difference = max_difference.max((a.1 - b.1).norm());
                    }
                }
                CrossRow {
                    point: z,
                    methods: values.iter().map(|v| v.0).collect(),
                    max_difference,
                }
            })
            .collect();
        report.push(Section::ok("cross-method", rows));
    }
    Ok(Outcome::report_only(report))
}

fn viewport(s: &Settings) -> Result<Viewport, CliError> {
    let v = &s.viewport;
    Ok(Viewport::new(v.center, v.half_width, v.cols, v.rows)?)
}

fn output_path(s: &Settings) -> Result<PathBuf, CliError> {
    s.out
        .clone()
        .ok_or_else(|| CliError::Usage("render needs --out <path>".into()))
}

#[derive(Serialize)]
struct RasterSection<'a> {
    mode: &'static str,
    viewport: &'a ViewportConfig,
    grid: &'a RasterGrid,
    output: String,
    bounded: usize,
    escaped: usize,
    unresolved: usize,
    basins: Vec<usize>,
}

fn raster_section<'a>(mode: &'static str, s: &'a Settings, grid: &'a RasterGrid, path: &std::path::Path, roots: usize) -> RasterSection<'a> {
    let count = |pred: &dyn Fn(&Cell) -> bool| grid.cells.iter().filter(|c| pred(c)).count();
    RasterSection {
        mode,
        viewport: &s.viewport,
        grid,
        output: path.display().to_string(),
        bounded: count(&|c| *c == Cell::Bounded),
        escaped: count(&|c| matches!(c, Cell::Escape(_))),
        unresolved: count(&|c| *c == Cell::Unresolved),
        basins: (0..roots).map(|k| count(&|c| *c == Cell::Basin(k))).collect(),
    }
}

/// Finite repelling fixed point of largest multiplier modulus, a point of
/// the Julia set with infinite backward orbit.
fn repelling_seed(f: &RationalMap) -> Result<SpherePoint, CliError> {
    let fixed = periodic_cycles(f, 1)?;
    fixed
        .iter()
        .filter(|c| c.class.is_repelling() && !c.points[0].is_infinite())
        .max_by(|a, b| a.multiplier.norm().total_cmp(&b.multiplier.norm()))
        .map(|c| c.points[0])
        .ok_or_else(|| CliError::Numeric(crate::error::Error::InvalidInput("no finite repelling fixed point to seed from".into())))
}

pub fn cmd_render(s: &Settings) -> Result<Outcome, CliError> {
    let path = output_path(s)?;
    match s.mode {
        Mode::Escape => {
            s.require_format(Format::Ppm)?;
            let f = s.map()?;
            let p = f
                .as_polynomial()
                .ok_or_else(|| CliError::Usage("escape mode needs a polynomial map".into()))?;
            let radius = s.escape_radius.unwrap_or_else(|| default_escape_radius(&p));
            let grid = escape_time_raster(&f, viewport(s)?, s.max_iter.unwrap_or(MAX_ITER_DEFAULT), radius)?;
            let palette = Palette::by_name(&s.viewport.palette, 0)?;
            let mut report = s.report("render", &f);
            report.push(Section::ok("render", raster_section("escape", s, &grid, &path, 0)));
            Ok(Outcome {
                report,
                artifact: Some(Artifact {
                    path,
                    bytes: grid.to_ppm(&palette),
                }),
            })
        }
        Mode::Newton => {
            s.require_format(Format::Ppm)?;
            let p = s
                .spec
                .polynomial()
                .ok_or_else(|| CliError::Usage("newton mode needs a 'poly:' or 'newton:' map spec".into()))?;
            let n = crate::newton::newton_map(p)?;
            let grid = newton_raster(p, viewport(s)?, s.max_iter.unwrap_or(NEWTON_MAX_ITER_DEFAULT), s.tol)?;
            let roots = crate::fixedpoints::poly_roots(p)?;
            let palette = Palette::by_name(&s.viewport.palette, roots.len())?;
            let mut report = s.report("render", &n);
            report.push(Section::ok("render", raster_section("newton", s, &grid, &path, roots.len())));
            report.push(Section::ok("roots", &roots));
            if roots.len() == 2 {
                let check = cayley_check(&grid, &[roots[0], roots[1]]);
                let data = serde_json::json!({
                    "disagreements": check.disagreements,
                    "outside_one_pixel_band": check.outside_band,
                });
                report.push(if check.outside_band == 0 {
                    Section::ok("cayley", data)
                } else {
                    Section::flagged("cayley", "labels disagree with the bisector rule away from the bisector", data)
                });
            }
            Ok(Outcome {
                report,
                artifact: Some(Artifact {
                    path,
                    bytes: grid.to_ppm(&palette),
                }),
            })
        }
        Mode::Inverse => {
            s.require_format(Format::Csv)?;
            let f = s.map()?;
            let seed_point = match s.center.as_str() {
                "auto" => repelling_seed(&f)?,
                other => parse_center(other)?,
            };
            let cloud = inverse_iteration(&f, seed_point, s.depth, s.cap, s.viewport.seed)?;
            let mut report = s.report("render", &f);
            report.push(Section::ok(
                "render",
                serde_json::json!({
                    "mode": "inverse",
                    "method": cloud.method,
                    "seed_point": cloud.seed_point,
                    "seed": cloud.rng_seed,
                    "depth": cloud.depth,
                    "cap": cloud.cap,
                    "points": cloud.points.len(),
                    "skipped": cloud.skipped,
                    "output": path.display().to_string(),
                }),
            ));
            Ok(Outcome {
                report,
                artifact: Some(Artifact {
                    path,
                    bytes: cloud.to_csv().into_bytes(),
                }),
            })
        }
    }
}

pub fn cmd_probe(s: &Settings) -> Result<Outcome, CliError> {
    s.require_format(Format::Json)?;
    let f = s.map()?;
    let mut report = s.report("probe", &f);
    let (c, r) = s.region;
    let u = Region::disk(c, r);
    match s.kind {
        ProbeKind::Marty => {
            let n_max = s.n_max.unwrap_or(MARTY_N_MAX_DEFAULT);
            let values = marty_diagnostic(&f, u, n_max)?;
            report.push(Section::ok(
                "marty",
                serde_json::json!({
                    "region": u,
                    "n_max": n_max,
                    "threshold": MARTY_THRESHOLD,
                    "non_normal": flags_non_normality(&values),
                    "values": values,
                }),
            ));
        }
        ProbeKind::Transitivity => {
            let (vc, vr) = s
                .target
                .ok_or_else(|| CliError::Usage("transitivity probe needs --target cx,cy,r".into()))?;
            let v = Region::disk(vc, vr);
            let n_max = s.n_max.unwrap_or(TRANSITIVITY_N_MAX_DEFAULT);
            let hit = transitivity_probe(&f, u, v, n_max)?;
            let mut data = serde_json::json!({
                "u": u,
                "v": v,
                "n_max": n_max,
                "hit": hit.is_some(),
            });
            if let Some(n) = hit {
                data["first_n"] = n.into();
            }
            report.push(Section::ok("transitivity", data));
        }
    }
    Ok(Outcome::report_only(report))
}
