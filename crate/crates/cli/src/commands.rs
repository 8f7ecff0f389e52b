use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use wellfilled::approximation::{individual_approximation, NeighborhoodFile, NeighborhoodSpec};
use wellfilled::direct_limits::{
    set_colimit, universal_map, Cone, DirectSystemOfSets, SetSystemFile,
};
use wellfilled::filling::Filling;
use wellfilled::filtered::{FilteredSpaceModel, WellFilledChart};
use wellfilled::invariants::{
    default_probes, default_step_loops, palais_experiment, pi0_report, pi1_directlimit_experiment,
    punctured_model, punctured_slab_input, punctured_slab_model, random_component_model,
    two_ball_input, two_ball_model, ComponentModel, FundamentalGroupComparison, LoopModel,
    PalaisInput, Pi1Report,
};
use wellfilled::plmap::{MapFile, PLMapFile};
use wellfilled::scalar::format_rational;
use wellfilled::simplicial::ComplexFile;
use wellfilled::{
    Error, ExactComplex, ExactPoint, ExactSimplex, PLMap, Rational, Result, Scalar,
    SubcomplexCarrier,
};

use crate::config::RunConfig;

/// A finished run: the report, a human summary, and whether every
/// checked property held.
pub struct Outcome {
    pub report: Value,
    pub summary: Vec<String>,
    pub holds: bool,
    /// Tabular plot data, when the command produces any.
    pub plot: Option<String>,
    /// Extra artifact written next to the report (e.g. a subdivided complex).
    pub artifact: Option<Value>,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn to_value(x: &impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn report(command: &str, cfg: &RunConfig, body: Value) -> Result<Value> {
    Ok(json!({ "command": command, "config": to_value(cfg)?, "result": body }))
}

pub fn subdivide(
    cfg: &mut RunConfig,
    input: &Path,
    delta: &str,
    max_level: Option<usize>,
) -> Result<Outcome> {
    cfg.input("complex", input);
    let delta = wellfilled::scalar::parse_rational(delta)?;
    let complex = load::<ComplexFile<Rational>>(input)?.into_complex()?;
    let (m, sub) = complex.subdivide_until_tracked(&delta, max_level)?;
    let d2 = sub.complex.max_diameter_sq();
    let body = json!({
        "delta": format_rational(&delta),
        "m": m,
        "max_diameter_sq": format_rational(&d2),
        "max_diameter": d2.to_f64_lossy().sqrt(),
        "vertices": sub.complex.vertices().len(),
        "top_simplices": sub.complex.maximal_simplices().len(),
    });
    Ok(Outcome {
        summary: vec![
            format!("m = {m}"),
            format!(
                "max diameter = sqrt({}) ~ {:.6}",
                format_rational(&d2),
                d2.to_f64_lossy().sqrt()
            ),
        ],
        report: report("subdivide", cfg, body)?,
        holds: true,
        plot: None,
        artifact: Some(to_value(&ComplexFile::from_complex(&sub.complex))?),
    })
}

pub fn fill(cfg: &mut RunConfig, simplex: &Path, boundary: &Path, probe: &Path) -> Result<Outcome> {
    cfg.input("simplex", simplex);
    cfg.input("boundary", boundary);
    cfg.input("probe", probe);
    let simplex: ExactSimplex = load(simplex)?;
    let gamma: PLMap<Rational> = load::<PLMapFile<Rational>>(boundary)?.into_map()?;
    let probes: Vec<ExactPoint> = load(probe)?;
    let filling = Filling::new(simplex, &gamma)?;
    let mut rows = Vec::new();
    let mut verified = 0;
    for x in &probes {
        let c = filling.eval_certified(x)?;
        let ok = c.verify();
        verified += usize::from(ok);
        rows.push(json!({ "x": x, "value": c.value, "certificate": c, "verified": ok }));
    }
    let holds = verified == probes.len();
    Ok(Outcome {
        summary: vec![format!(
            "{} probes, {verified} certificates verified",
            probes.len()
        )],
        report: report(
            "fill",
            cfg,
            json!({ "anchor": filling.anchor(), "probes": rows, "all_verified": holds }),
        )?,
        holds,
        plot: None,
        artifact: None,
    })
}

pub fn colimit(cfg: &mut RunConfig, system: &Path, cone: Option<&Path>) -> Result<Outcome> {
    cfg.input("system", system);
    let sys = DirectSystemOfSets::from_file(&load::<SetSystemFile>(system)?)?;
    let c = set_colimit(&sys);
    let witnesses_verified = c.witnesses.iter().all(|w| w.verify(&sys));
    let name = |t: &wellfilled::direct_limits::Tagged| {
        format!(
            "{}:{}",
            sys.labels()[t.index],
            sys.elements(t.index)[t.element]
        )
    };
    let mut summary = vec![format!("{} classes", c.classes.len())];
    for (i, class) in c.classes.iter().enumerate() {
        summary.push(format!(
            "class {i}: {}",
            class.iter().map(name).collect::<Vec<_>>().join(" ")
        ));
    }
    for w in &c.witnesses {
        summary.push(format!(
            "witness: {} ~ {} in {}",
            name(&w.left),
            name(&w.right),
            sys.labels()[w.gamma]
        ));
    }
    let mut body = json!({ "classes": c.classes, "class_of": c.class_of, "witnesses": c.witnesses, "witnesses_verified": witnesses_verified });
    if let Some(path) = cone {
        cfg.input("cone", path);
        let cone: Cone = load(path)?;
        let psi = universal_map(&sys, &c, &cone)?;
        summary.push(format!(
            "psi: {:?} (bijective: {})",
            psi.psi,
            psi.bijective()
        ));
        body["universal_map"] = to_value(&psi)?;
    }
    Ok(Outcome {
        report: report("colimit", cfg, body)?,
        summary,
        holds: witnesses_verified,
        plot: None,
        artifact: None,
    })
}

pub fn validate_chart(cfg: &mut RunConfig, chart: &Path, model: &Path) -> Result<Outcome> {
    cfg.input("chart", chart);
    cfg.input("model", model);
    let chart: WellFilledChart<Rational> = load(chart)?;
    let model: FilteredSpaceModel<Rational> = load(model)?;
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = chart.validate(&model, &mut rng)?;
    let summary = [
        ("a", &r.a),
        ("b", &r.b),
        ("d", &r.d),
        ("e", &r.e),
        ("f", &r.f),
    ]
    .iter()
    .map(|(k, s)| format!("({k}) {}", if s.holds() { "holds" } else { "fails" }))
    .chain([format!("well filled: {}", r.well_filled)])
    .collect();
    Ok(Outcome {
        holds: r.well_filled,
        report: report("validate-chart", cfg, to_value(&r)?)?,
        summary,
        plot: None,
        artifact: None,
    })
}

pub struct ApproximateInputs<'a> {
    pub complex: &'a Path,
    pub map: &'a Path,
    pub spec: &'a Path,
    pub relative: Option<&'a Path>,
    pub model: &'a Path,
    pub alpha: Option<usize>,
}

pub fn approximate(cfg: &mut RunConfig, inp: &ApproximateInputs) -> Result<Outcome> {
    cfg.input("complex", inp.complex);
    cfg.input("map", inp.map);
    cfg.input("spec", inp.spec);
    cfg.input("model", inp.model);
    let complex: ExactComplex = load::<ComplexFile<Rational>>(inp.complex)?.into_complex()?;
    let gamma0 = PLMap::new(complex.clone(), load::<MapFile<Rational>>(inp.map)?.values)?;
    let q = NeighborhoodSpec::from_file(load::<NeighborhoodFile<Rational>>(inp.spec)?, &complex)?;
    let relative = match inp.relative {
        Some(p) => {
            cfg.input("relative", p);
            load::<SubcomplexCarrier>(p)?
        }
        None => SubcomplexCarrier::empty(),
    };
    let model: FilteredSpaceModel<Rational> = load(inp.model)?;
    model.validate()?;
    let alpha = inp.alpha.unwrap_or_else(|| model.filtration.bottom());
    let record = individual_approximation(
        &complex,
        &gamma0,
        &q,
        &relative,
        &model,
        alpha,
        &cfg.individual(),
    )?;
    let eta_in_q = q.check_pl(&record.eta)?;
    let certified = record.certified();
    let holds = certified && eta_in_q.holds;
    let summary = vec![
        format!("alpha = {alpha}, beta = {}", record.beta),
        format!(
            "epsilon = {}, pushed anchors = {}",
            record.epsilon.to_json(),
            record.pushed.len()
        ),
        format!(
            "homotopy certified: {certified}, eta in Q: {}",
            eta_in_q.holds
        ),
    ];
    let body = json!({ "record": to_value(&record.to_file())?, "eta_in_q": to_value(&eta_in_q)? });
    Ok(Outcome {
        report: report("approximate", cfg, body)?,
        summary,
        holds,
        plot: None,
        artifact: None,
    })
}

pub fn pi0(cfg: &mut RunConfig, model: Option<&Path>, random: usize) -> Result<Outcome> {
    let models: Vec<ComponentModel<Rational>> = match model {
        Some(p) => {
            cfg.input("model", p);
            vec![load(p)?]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..random)
                .map(|_| random_component_model(&mut rng))
                .collect::<Result<_>>()?
        }
    };
    let mut reports = Vec::new();
    let mut summary = Vec::new();
    let mut holds = true;
    for (i, m) in models.iter().enumerate() {
        let r = pi0_report(m)?;
        let ok = r.holds() && r.basepoint_union_equal;
        holds &= ok;
        summary.push(format!(
            "model {i}: {} ambient components, {} colimit classes, basepoint component = union of steps: {}, {}",
            r.ambient_components,
            r.colimit_classes,
            r.basepoint_union_equal,
            if ok { "pass" } else { "fail" }
        ));
        reports.push(r);
    }
    let mut plot = String::from("# components per step\nmodel\tstep\tpoints\tcomponents\n");
    for (i, r) in reports.iter().enumerate() {
        for s in &r.steps {
            plot.push_str(&format!(
                "{i}\t{}\t{}\t{}\n",
                s.index, s.points, s.components
            ));
        }
    }
    Ok(Outcome {
        report: report("experiment pi0", cfg, to_value(&reports)?)?,
        summary,
        holds,
        plot: Some(plot),
        artifact: None,
    })
}

fn pi1_plot(r: &Pi1Report) -> String {
    let mut s =
        String::from("# beta vs probe\nprobe\twinding_before\twinding_after\talpha\tbeta\n");
    for p in &r.surjectivity {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            p.index, p.winding_before, p.winding_after, p.alpha, p.beta
        ));
    }
    s.push_str("\n# winding vs step index\nstep\twinding\tsource\n");
    for l in &r.colimit.loops {
        s.push_str(&format!("{}\t{}\t{}\n", l.step, l.winding, l.source));
    }
    s
}

fn pi1_summary(r: &Pi1Report) -> Vec<String> {
    let mut out: Vec<String> = r
        .surjectivity
        .iter()
        .map(|p| {
            format!(
                "probe {}: winding {} -> {}, alpha = {}, beta = {}, {}",
                p.index,
                p.winding_before,
                p.winding_after,
                p.alpha,
                p.beta,
                if p.holds() { "pass" } else { "fail" }
            )
        })
        .collect();
    for (k, i) in r.injectivity.iter().enumerate() {
        out.push(format!(
            "injectivity {k}: windings {:?}, beta = {:?}, {}",
            i.winding,
            i.beta,
            if i.holds() { "pass" } else { "fail" }
        ));
    }
    out.push(format!(
        "colimit: {} classes onto windings {:?}, bijective: {}",
        r.colimit.colimit_classes,
        r.colimit.targets,
        r.colimit.bijective()
    ));
    out
}

pub enum Pi1Source<'a> {
    Files {
        model: &'a Path,
        probes: &'a Path,
        step_loops: Option<&'a Path>,
    },
    /// `S^8` minus a coordinate plane with the default probes and step loops.
    Punctured,
}

pub fn pi1(cfg: &mut RunConfig, src: Pi1Source) -> Result<Outcome> {
    let (model, probes, step_loops) = match src {
        Pi1Source::Files {
            model,
            probes,
            step_loops,
        } => {
            cfg.input("model", model);
            cfg.input("probes", probes);
            let steps: Vec<LoopModel<Rational>> = match step_loops {
                Some(p) => {
                    cfg.input("step_loops", p);
                    load(p)?
                }
                None => Vec::new(),
            };
            (
                load::<FilteredSpaceModel<Rational>>(model)?,
                load::<Vec<LoopModel<Rational>>>(probes)?,
                steps,
            )
        }
        Pi1Source::Punctured => (
            punctured_model(8)?,
            default_probes(8, (0, 1), &Rational::from_ratio(1, 4))?,
            default_step_loops(8, (0, 1), 16)?,
        ),
    };
    model.validate()?;
    let r = pi1_directlimit_experiment(&model, &probes, &step_loops, &cfg.pi1())?;
    Ok(Outcome {
        summary: pi1_summary(&r),
        holds: r.holds(),
        plot: Some(pi1_plot(&r)),
        report: report("experiment pi1", cfg, to_value(&r)?)?,
        artifact: None,
    })
}

pub enum PalaisSource<'a> {
    Files { model: &'a Path, input: &'a Path },
    TwoBall { samples: usize },
    PuncturedSlab { samples: usize },
}

pub fn palais(cfg: &mut RunConfig, src: PalaisSource) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (model, input): (FilteredSpaceModel<Rational>, PalaisInput<Rational>) = match src {
        PalaisSource::Files { model, input } => {
            cfg.input("model", model);
            cfg.input("input", input);
            (load(model)?, load(input)?)
        }
        PalaisSource::TwoBall { samples } => {
            (two_ball_model()?, two_ball_input(&mut rng, samples)?)
        }
        PalaisSource::PuncturedSlab { samples } => (
            punctured_slab_model()?,
            punctured_slab_input(&mut rng, samples)?,
        ),
    };
    let r = palais_experiment(&model, &input, cfg.density_samples, &cfg.pi1())?;
    let mut summary = vec![
        format!(
            "density: {}",
            if r.density.passed { "pass" } else { "fail" }
        ),
        format!(
            "projection witnesses: {} verified: {}",
            r.projection_witnesses, r.projection_witnesses_verified
        ),
        format!(
            "k = 0: {} colimit classes, {} ambient components, bijective: {}",
            r.pi0.colimit_classes,
            r.pi0.ambient_components,
            r.pi0.holds()
        ),
        format!("k = 1: bijective: {}", r.pi1.bijective()),
    ];
    let plot = match &r.pi1 {
        FundamentalGroupComparison::Winding(p) => {
            summary.extend(pi1_summary(p));
            Some(pi1_plot(p))
        }
        FundamentalGroupComparison::Convex(_) => None,
    };
    Ok(Outcome {
        holds: r.holds(),
        report: report("experiment palais", cfg, to_value(&r)?)?,
        summary,
        plot,
        artifact: None,
    })
}
