//! 0 ok, 1 input error, 2 unsatisfiable layout/geometry, 3 verification or
//! review failure. All randomness flows from the record seed or `--seed`;
//! outputs are byte-stable across reruns.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clawcanvas::canvas::{compile, emit_html_text_layer, emit_svg, parse_svg_subset};
use clawcanvas::layers::{
    apply_edit, composite, parse_layerdoc, serialize_layerdoc, unedited_mask, EditOp, Image,
    Mask, MetricError, Payload,
};
use clawcanvas::layout::{solve, SolveError};
use clawcanvas::physics::{
    annotate_sketch, buoyant_fraction, jet_range, mirror_reflect, spring_extension, Annotation,
    PhysicsConfig, PhysicsError,
};
use clawcanvas::pipeline::{
    attribute_failure, run_pipeline, PipelineConfig, PipelineError, Stage, ToolClients,
};
use clawcanvas::scene::{parse_records, validate, SceneRecord};
use clawcanvas::verify::verify_canvas;
use clawcanvas::Color;
use clawcanvas::geom::{Line, Point};

const EXIT_INPUT: u8 = 1;
const EXIT_UNSAT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "clawcanvas", version, about = "Scene-record compiler, verifier, and sketch pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,
    /// Override the record's layout seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for written artifacts (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Mock client fixture directory (else $CLAWCANVAS_FIXTURES).
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a scene record into sketch.svg, layout.json, and text.html.
    Compile {
        /// Path to a *.scene.jsonl record.
        record: PathBuf,
    },
    /// Verify a compiled canvas against its scene record.
    Verify {
        /// Path to a sketch.svg produced by `compile`.
        canvas: PathBuf,
        /// Path to the *.scene.jsonl record it must satisfy.
        record: PathBuf,
    },
    /// Layered-document operations.
    #[command(subcommand)]
    Layers(LayersCommand),
    /// Physics helpers: scalar solvers and sketch annotation.
    #[command(subcommand)]
    Physics(PhysicsCommand),
    /// Pipeline orchestration over mock clients.
    #[command(subcommand)]
    Pipeline(PipelineCommand),
}

#[derive(Subcommand)]
enum LayersCommand {
    /// Flatten a layer document to composite.png.
    Composite {
        /// Path to a *.layers.jsonl document.
        doc: PathBuf,
    },
    /// Apply one edit, writing edited.layers.jsonl.
    Edit {
        /// Path to a *.layers.jsonl document.
        doc: PathBuf,
        #[command(subcommand)]
        op: EditCommand,
    },
    /// PSNR/SSIM between the composites before and after an edit,
    /// restricted to the regions the edit could not touch.
    DiffMetrics {
        /// Path to a *.layers.jsonl document.
        doc: PathBuf,
        #[command(subcommand)]
        op: EditCommand,
    },
}

#[derive(Subcommand, Clone)]
enum EditCommand {
    /// Shift a layer by whole pixels.
    Translate {
        #[arg(long)]
        layer: String,
        #[arg(long, allow_hyphen_values = true)]
        dx: i64,
        #[arg(long, allow_hyphen_values = true)]
        dy: i64,
    },
    /// Set a layer's opacity in [0, 1].
    SetOpacity {
        #[arg(long)]
        layer: String,
        #[arg(long)]
        value: f64,
    },
    /// Recolor a layer to a palette color at composite time.
    Recolor {
        #[arg(long)]
        layer: String,
        #[arg(long)]
        color: String,
    },
    /// Remove a layer.
    Delete {
        #[arg(long)]
        layer: String,
    },
    /// Move a layer to a new z, renumbering to keep z strictly increasing.
    Reorder {
        #[arg(long)]
        layer: String,
        #[arg(long, allow_hyphen_values = true)]
        z: i64,
    },
    /// Swap a layer's payload for a solid color block.
    ReplacePayload {
        #[arg(long)]
        layer: String,
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        /// RGBA as four comma-separated bytes, e.g. 200,30,30,255.
        #[arg(long)]
        rgba: String,
    },
}

#[derive(Subcommand)]
enum PhysicsCommand {
    /// Horizontal range of a water jet from a tank hole.
    Jet {
        /// Water surface height in meters.
        #[arg(long = "H")]
        surface: f64,
        /// Hole height in meters (0 <= h < H).
        #[arg(long = "h")]
        hole: f64,
    },
    /// Spring extension under a static load (Hooke's law).
    Spring {
        /// Applied force in newtons.
        #[arg(long = "F")]
        force: f64,
        /// Stiffness in newtons per meter.
        #[arg(long = "k")]
        stiffness: f64,
    },
    /// Submerged volume fraction of a floating body.
    Buoyancy {
        #[arg(long)]
        rho_object: f64,
        #[arg(long)]
        rho_fluid: f64,
    },
    /// Reflect a point across a mirror line.
    Reflect {
        #[arg(long, allow_hyphen_values = true)]
        px: f64,
        #[arg(long, allow_hyphen_values = true)]
        py: f64,
        /// A point on the mirror line.
        #[arg(long, allow_hyphen_values = true)]
        ox: f64,
        #[arg(long, allow_hyphen_values = true)]
        oy: f64,
        /// Mirror line direction.
        #[arg(long, allow_hyphen_values = true)]
        dx: f64,
        #[arg(long, allow_hyphen_values = true)]
        dy: f64,
    },
    /// Splice physics annotations into a sketch, writing annotated.svg.
    Annotate {
        /// Path to a sketch.svg produced by `compile`.
        canvas: PathBuf,
        /// JSON array of annotation objects (see --help for the schema).
        #[arg(long)]
        annotations: PathBuf,
    },
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Run conceptualize -> sketch -> color -> review against mock clients.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// The user request handed to the reasoner client.
    request: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match &cli.command {
        Command::Compile { record } => cmd_compile(cli, record, &out_dir),
        Command::Verify { canvas, record } => cmd_verify(cli, canvas, record, &out_dir),
        Command::Layers(command) => cmd_layers(cli, command, &out_dir),
        Command::Physics(command) => cmd_physics(cli, command, &out_dir),
        Command::Pipeline(PipelineCommand::Run(args)) => cmd_pipeline_run(cli, args, &out_dir),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_record(path: &Path, seed: Option<u64>) -> Result<SceneRecord, Failure> {
    let bytes = read(path)?;
    let mut record = parse_records(&bytes)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        record.canvas.seed = seed;
    }
    Ok(record)
}

fn ensure_out(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))
}

fn write_artifact(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    std::fs::write(&path, bytes)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn cmd_compile(cli: &Cli, record_path: &Path, out_dir: &Path) -> Result<(), Failure> {
    let record = load_record(record_path, cli.seed)?;
    let validation = validate(&record);
    if !validation.is_clean() {
        // Cycles make the layout unsatisfiable; everything else is an
        // input problem. The solver re-derives the same split.
        let issues: Vec<String> =
            validation.issues.iter().map(|i| i.to_string()).collect();
        let code = if issues.iter().any(|i| i.contains("cyclic")) {
            EXIT_UNSAT
        } else {
            EXIT_INPUT
        };
        return Err(Failure { code, message: issues.join("; ") });
    }
    let solution = solve(&record).map_err(|e| match e {
        SolveError::Unsatisfiable(_) | SolveError::InstanceOverflow(_) => {
            Failure { code: EXIT_UNSAT, message: e.to_string() }
        }
    })?;
    let ir = compile(&record, &solution).map_err(|e| Failure::input(e.to_string()))?;

    ensure_out(out_dir)?;
    let mut artifacts = vec![
        write_artifact(out_dir, "layout.json", &solution.to_json_bytes())?,
        write_artifact(out_dir, "sketch.svg", &emit_svg(&ir))?,
    ];
    if !record.texts.is_empty() {
        let html = emit_html_text_layer(&record).map_err(|e| Failure::input(e.to_string()))?;
        artifacts.push(write_artifact(out_dir, "text.html", &html)?);
    }

    if cli.json {
        let names: Vec<String> = artifacts
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "artifacts": names,
                "iterations": solution.iterations_used,
                "out": out_dir.display().to_string(),
                "seed": record.canvas.seed,
            })
        );
    } else {
        for artifact in &artifacts {
            println!("wrote {}", artifact.display());
        }
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    canvas_path: &Path,
    record_path: &Path,
    out_dir: &Path,
) -> Result<(), Failure> {
    let svg = read(canvas_path)?;
    let ir = parse_svg_subset(&svg)
        .map_err(|e| Failure::input(format!("{}: {e}", canvas_path.display())))?;
    let record = load_record(record_path, None)?;
    let report = verify_canvas(&ir, &record);

    if cli.json {
        print!("{}", String::from_utf8_lossy(&report.to_json_bytes()));
    } else {
        print!("{}", report.to_table());
    }
    if cli.out.is_some() {
        ensure_out(out_dir)?;
        write_artifact(out_dir, "verify.report.json", &report.to_json_bytes())?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> =
            report.failed_categories().iter().map(|c| c.name()).collect();
        Err(Failure {
            code: EXIT_VERIFY,
            message: format!("verification failed: {}", failed.join(", ")),
        })
    }
}

fn parse_edit(op: &EditCommand) -> Result<EditOp, Failure> {
    Ok(match op {
        EditCommand::Translate { layer, dx, dy } => {
            EditOp::Translate { layer_id: layer.clone(), dx: *dx, dy: *dy }
        }
        EditCommand::SetOpacity { layer, value } => {
            EditOp::SetOpacity { layer_id: layer.clone(), value: *value }
        }
        EditCommand::Recolor { layer, color } => {
            let target: Color = color
                .parse()
                .map_err(|_| Failure::input(format!("unknown color '{color}'")))?;
            EditOp::Recolor { layer_id: layer.clone(), target }
        }
        EditCommand::Delete { layer } => EditOp::Delete { layer_id: layer.clone() },
        EditCommand::Reorder { layer, z } => {
            EditOp::Reorder { layer_id: layer.clone(), new_z: *z }
        }
        EditCommand::ReplacePayload { layer, width, height, rgba } => {
            let parts: Vec<u8> = rgba
                .split(',')
                .map(|p| p.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::input(format!("bad --rgba '{rgba}'")))?;
            let [r, g, b, a] = parts[..] else {
                return Err(Failure::input(format!("--rgba needs 4 bytes, got '{rgba}'")));
            };
            EditOp::ReplacePayload {
                layer_id: layer.clone(),
                payload: Payload::Solid { width: *width, height: *height, color: [r, g, b, a] },
            }
        }
    })
}

fn load_layerdoc(path: &Path) -> Result<(clawcanvas::layers::LayerDoc, PathBuf), Failure> {
    let bytes = read(path)?;
    let doc = parse_layerdoc(&bytes)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let root = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Ok((doc, root))
}

fn cmd_layers(cli: &Cli, command: &LayersCommand, out_dir: &Path) -> Result<(), Failure> {
    match command {
        LayersCommand::Composite { doc } => {
            let (doc, root) = load_layerdoc(doc)?;
            let image = composite(&doc, &root).map_err(|e| Failure::input(e.to_string()))?;
            ensure_out(out_dir)?;
            let path = out_dir.join("composite.png");
            image.save(&path).map_err(|e| Failure::input(e.to_string()))?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "height": image.height,
                        "out": path.display().to_string(),
                        "width": image.width,
                    })
                );
            } else {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        LayersCommand::Edit { doc, op } => {
            let (doc, _) = load_layerdoc(doc)?;
            let edit = parse_edit(op)?;
            let edited = apply_edit(&doc, &edit).map_err(|e| Failure::input(e.to_string()))?;
            ensure_out(out_dir)?;
            let path = write_artifact(out_dir, "edited.layers.jsonl", &serialize_layerdoc(&edited))?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "layers": edited.layers.len(),
                        "out": path.display().to_string(),
                    })
                );
            } else {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        LayersCommand::DiffMetrics { doc, op } => {
            let (doc, root) = load_layerdoc(doc)?;
            let edit = parse_edit(op)?;
            let before = composite(&doc, &root).map_err(|e| Failure::input(e.to_string()))?;
            let edited = apply_edit(&doc, &edit).map_err(|e| Failure::input(e.to_string()))?;
            let after = composite(&edited, &root).map_err(|e| Failure::input(e.to_string()))?;
            let mask = unedited_mask(&doc, &edit, &root)
                .map_err(|e| Failure::input(e.to_string()))?;
            print_metrics(cli, &before, &after, &mask)
        }
    }
}

fn print_metrics(cli: &Cli, before: &Image, after: &Image, mask: &Mask) -> Result<(), Failure> {
    let metric_err = |e: MetricError| Failure::input(e.to_string());
    let psnr_value = clawcanvas::layers::psnr(before, after, mask).map_err(metric_err)?;
    let ssim_value = clawcanvas::layers::ssim(before, after, mask).map_err(metric_err)?;
    // JSON has no infinity; render it as the string "inf".
    let psnr_json = if psnr_value.is_infinite() {
        serde_json::Value::from("inf")
    } else {
        serde_json::Value::from(psnr_value)
    };
    if cli.json {
        println!(
            "{}",
            serde_json::json!({ "psnr": psnr_json, "ssim": ssim_value })
        );
    } else {
        println!("psnr: {psnr_value}");
        println!("ssim: {ssim_value}");
    }
    Ok(())
}

fn physics_failure(e: PhysicsError) -> Failure {
    let code = match e {
        PhysicsError::GeometryOverflow(_) => EXIT_UNSAT,
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

fn print_scalar(cli: &Cli, key: &str, value: f64) {
    if cli.json {
        println!("{}", serde_json::json!({ key: value }));
    } else {
        println!("{key}: {value}");
    }
}

fn cmd_physics(cli: &Cli, command: &PhysicsCommand, out_dir: &Path) -> Result<(), Failure> {
    let config = PhysicsConfig::default();
    match command {
        PhysicsCommand::Jet { surface, hole } => {
            let range = jet_range(*surface, *hole, &config).map_err(physics_failure)?;
            print_scalar(cli, "range", range);
            Ok(())
        }
        PhysicsCommand::Spring { force, stiffness } => {
            let extension = spring_extension(*force, *stiffness).map_err(physics_failure)?;
            print_scalar(cli, "extension", extension);
            Ok(())
        }
        PhysicsCommand::Buoyancy { rho_object, rho_fluid } => {
            let (fraction, floats) =
                buoyant_fraction(*rho_object, *rho_fluid).map_err(physics_failure)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({ "floats": floats, "fraction": fraction })
                );
            } else {
                println!("fraction: {fraction}");
                println!("floats: {floats}");
            }
            Ok(())
        }
        PhysicsCommand::Reflect { px, py, ox, oy, dx, dy } => {
            let line = Line {
                point: Point { x: *ox, y: *oy },
                direction: Point { x: *dx, y: *dy },
            };
            let image = mirror_reflect(Point { x: *px, y: *py }, &line)
                .map_err(physics_failure)?;
            if cli.json {
                println!("{}", serde_json::json!({ "x": image.x, "y": image.y }));
            } else {
                println!("x: {}", image.x);
                println!("y: {}", image.y);
            }
            Ok(())
        }
        PhysicsCommand::Annotate { canvas, annotations } => {
            let svg = read(canvas)?;
            let mut ir = parse_svg_subset(&svg)
                .map_err(|e| Failure::input(format!("{}: {e}", canvas.display())))?;
            for annotation in parse_annotations(&read(annotations)?)? {
                ir = annotate_sketch(&ir, &annotation).map_err(physics_failure)?;
            }
            ensure_out(out_dir)?;
            let path = write_artifact(out_dir, "annotated.svg", &emit_svg(&ir))?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "nodes": ir.flat_nodes().len(),
                        "out": path.display().to_string(),
                    })
                );
            } else {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

/// Annotation file: a JSON array of objects tagged by `kind`:
/// `reflection {source, mirror: {point: [x,y], direction: [dx,dy]}}`,
/// `spring {id, anchor: [x,y], force, stiffness, natural_length,
/// pixels_per_meter}`, `jet_arc {id, hole: [x,y], surface_height,
/// hole_height, pixels_per_meter}`, and
/// `waterline {id, target, rho_object, rho_fluid}`.
fn parse_annotations(bytes: &[u8]) -> Result<Vec<Annotation>, Failure> {
    let value: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| Failure::input(format!("annotations: {e}")))?;
    let items = value
        .as_array()
        .ok_or_else(|| Failure::input("annotations: expected a JSON array"))?;

    let bad = |what: &str| Failure::input(format!("annotations: {what}"));
    let point = |v: &serde_json::Value, what: &str| -> Result<Point, Failure> {
        let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
            Failure::input(format!("annotations: {what} must be [x, y]"))
        })?;
        let (Some(x), Some(y)) = (pair[0].as_f64(), pair[1].as_f64()) else {
            return Err(Failure::input(format!("annotations: {what} must be numeric")));
        };
        Ok(Point { x, y })
    };
    let num = |item: &serde_json::Value, key: &str| -> Result<f64, Failure> {
        item.get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| Failure::input(format!("annotations: missing number `{key}`")))
    };
    let text = |item: &serde_json::Value, key: &str| -> Result<String, Failure> {
        item.get(key)
            .and_then(serde_json::Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Failure::input(format!("annotations: missing string `{key}`")))
    };

    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let kind = item
            .get("kind")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| bad("each entry needs a `kind`"))?;
        out.push(match kind {
            "reflection" => {
                let mirror = item.get("mirror").ok_or_else(|| bad("missing `mirror`"))?;
                Annotation::Reflection {
                    source: text(item, "source")?,
                    mirror: Line {
                        point: point(
                            mirror.get("point").unwrap_or(&serde_json::Value::Null),
                            "mirror.point",
                        )?,
                        direction: point(
                            mirror.get("direction").unwrap_or(&serde_json::Value::Null),
                            "mirror.direction",
                        )?,
                    },
                }
            }
            "spring" => Annotation::Spring {
                id: text(item, "id")?,
                anchor: point(item.get("anchor").unwrap_or(&serde_json::Value::Null), "anchor")?,
                force: num(item, "force")?,
                stiffness: num(item, "stiffness")?,
                natural_length: num(item, "natural_length")?,
                pixels_per_meter: num(item, "pixels_per_meter")?,
            },
            "jet_arc" => Annotation::JetArc {
                id: text(item, "id")?,
                hole: point(item.get("hole").unwrap_or(&serde_json::Value::Null), "hole")?,
                surface_height: num(item, "surface_height")?,
                hole_height: num(item, "hole_height")?,
                pixels_per_meter: num(item, "pixels_per_meter")?,
            },
            "waterline" => Annotation::Waterline {
                id: text(item, "id")?,
                target: text(item, "target")?,
                rho_object: num(item, "rho_object")?,
                rho_fluid: num(item, "rho_fluid")?,
            },
            other => return Err(bad(&format!("unknown kind '{other}'"))),
        });
    }
    Ok(out)
}

fn cmd_pipeline_run(cli: &Cli, args: &RunArgs, out_dir: &Path) -> Result<(), Failure> {
    let fixtures = cli
        .fixtures
        .clone()
        .or_else(clawcanvas::pipeline::fixtures_root_from_env)
        .ok_or_else(|| {
            Failure::input("no fixture directory: pass --fixtures or set CLAWCANVAS_FIXTURES")
        })?;
    if !fixtures.is_dir() {
        return Err(Failure::input(format!(
            "fixture directory {} does not exist",
            fixtures.display()
        )));
    }
    let clients = ToolClients::mock(&fixtures);
    let mut config = PipelineConfig::new(out_dir);
    config.seed = cli.seed;

    let result = run_pipeline(&args.request, &clients, &config).map_err(|e| match e {
        PipelineError::StageFailure { stage, ref cause } => {
            let code = if cause.starts_with("unsatisfiable")
                || cause.contains("instance limit")
                || cause.contains("cyclic")
            {
                EXIT_UNSAT
            } else if cause.starts_with("compiled sketch fails verification") {
                EXIT_VERIFY
            } else {
                EXIT_INPUT
            };
            Failure { code, message: format!("stage: {}: {cause}", stage.name()) }
        }
        PipelineError::ClientTimeout(stage) => Failure {
            code: EXIT_INPUT,
            message: format!("stage: {}: client call timed out twice", stage.name()),
        },
        PipelineError::Io(e) => Failure::input(e.to_string()),
    })?;

    let stages: Vec<&str> = Stage::ALL.iter().map(|s| s.name()).collect();
    if result.accepted() {
        if cli.json {
            println!(
                "{}",
                serde_json::json!({
                    "accepted": true,
                    "out": out_dir.display().to_string(),
                    "stages": stages,
                })
            );
        } else {
            println!("accepted; artifacts in {}", out_dir.display());
        }
        return Ok(());
    }

    let attribution = attribute_failure(
        &result.ledger,
        &result.review,
        &result.record,
        &result.sketch_ir,
    )
    .map(|a| a.name().to_string())
    .unwrap_or_else(|e| e.to_string());
    if cli.json {
        println!(
            "{}",
            serde_json::json!({
                "accepted": false,
                "attribution": attribution,
                "out": out_dir.display().to_string(),
            })
        );
    }
    Err(Failure {
        code: EXIT_VERIFY,
        message: format!("run rejected; attribution: {attribution}"),
    })
}
