use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand};
use poncelet::api::{error_json, ClassificationView, DEFAULT_HEIGHT, DEFAULT_WIDTH};
use poncelet::locus::DEFAULT_SAMPLES;
use poncelet::render::{export_frames, render_scene, Scene, Style, StyleMode};
use poncelet::session::{decode, encode, ExperimentState, SCHEMA_VERSION};
use poncelet::{sweep_locus, DerivedKind, Error, FamilyKind, LocusRequest, LocusTarget};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "poncelet", version, about = "Poncelet triangle families: loci, classification and rendering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render the locus, conics and a snapshot triangle to SVG.
    Render {
        #[command(flatten)]
        locus: LocusArgs,
        #[command(flatten)]
        look: LookArgs,
        /// Family parameter of the snapshot triangle.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the locus classification as JSON.
    Classify {
        #[command(flatten)]
        locus: LocusArgs,
    },
    /// Write the sampled locus as CSV rows `t,x,y`.
    Sweep {
        #[command(flatten)]
        locus: LocusArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write numbered SVG frames with the triangle advancing by 2π/count.
    Frames {
        #[command(flatten)]
        locus: LocusArgs,
        #[command(flatten)]
        look: LookArgs,
        #[arg(long)]
        count: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode or decode a shareable experiment state.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
    /// Serve the JSON API, optionally with a static UI bundle.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum StateAction {
    Encode {
        #[command(flatten)]
        locus: LocusArgs,
        #[command(flatten)]
        look: LookArgs,
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
    },
    Decode {
        blob: String,
    },
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["center", "vertex"]))]
struct LocusArgs {
    #[arg(long)]
    family: FamilyKind,
    #[arg(short = 'a')]
    a: f64,
    #[arg(short = 'b')]
    b: f64,
    #[arg(long)]
    free: Option<f64>,
    /// Track triangle center X_k.
    #[arg(long)]
    center: Option<u32>,
    /// Track vertex 1, 2 or 3.
    #[arg(long)]
    vertex: Option<u8>,
    #[arg(long, default_value = "reference")]
    derived: DerivedKind,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl LocusArgs {
    fn target(&self) -> LocusTarget {
        match (self.center, self.vertex) {
            (Some(k), _) => LocusTarget::Center(k),
            (None, Some(i)) => LocusTarget::Vertex(i),
            (None, None) => unreachable!("clap enforces the target group"),
        }
    }

    fn request(&self) -> Result<LocusRequest, Error> {
        let family = poncelet::make_family(self.family, self.a, self.b, self.free)?;
        let req = LocusRequest::new(family, self.target()).with_derived(self.derived).with_samples(self.samples);
        req.validate()?;
        Ok(req)
    }
}

#[derive(Args, Debug)]
struct LookArgs {
    #[arg(long, default_value = "wireframe")]
    style: StyleMode,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    width: u32,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    height: u32,
}

impl LookArgs {
    fn style(&self) -> Style {
        Style::new(self.style).with_seed(self.seed)
    }
}

fn usage_error(e: &clap::Error) -> serde_json::Value {
    let flag = match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => Some(s.clone()),
        Some(ContextValue::Strings(v)) => v.first().cloned(),
        _ => None,
    };
    let message = e.to_string();
    let first = message.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
    json!({"code": "UsageError", "message": first, "flag": flag})
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("{}", usage_error(&e));
            return EXIT_USAGE;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Engine(e)) => {
            eprintln!("{}", error_json(&e));
            EXIT_COMPUTE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({"code": "IoError", "message": msg}));
            EXIT_COMPUTE
        }
    }
}

enum Failure {
    Engine(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Classification JSON shared with `POST /api/locus`.
pub fn classification_json(req: &LocusRequest) -> Result<String, Error> {
    let locus = sweep_locus(req)?;
    Ok(serde_json::to_string(&ClassificationView::from(&locus.classification)).expect("serializable"))
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Render { locus, look, t, output } => {
            let req = locus.request()?;
            if !t.is_finite() {
                return Err(Error::InvalidParameter(format!("t must be finite, got {t}")).into());
            }
            let scene = Scene {
                outer: Some(req.family.outer),
                caustic: Some(req.family.caustic),
                triangle: Some(req.family.triangle_at(t)?),
                loci: vec![sweep_locus(&req)?],
                arrangement: None,
            };
            let svg = render_scene(&scene, &look.style(), look.width, look.height)?;
            write_output(Some(&output), &svg)
        }
        Command::Classify { locus } => {
            let text = classification_json(&locus.request()?)?;
            write_output(None, &(text + "\n"))
        }
        Command::Sweep { locus, output } => {
            let l = sweep_locus(&locus.request()?)?;
            let mut csv = String::from("t,x,y\n");
            for (t, p) in l.params.iter().zip(&l.points) {
                csv.push_str(&format!("{t:?},{:?},{:?}\n", p.x, p.y));
            }
            write_output(output.as_ref(), &csv)
        }
        Command::Frames { locus, look, count, output } => {
            let frames = export_frames(&locus.request()?, &look.style(), count, look.width, look.height)?;
            std::fs::create_dir_all(&output)?;
            let digits = count.to_string().len().max(4);
            for (i, svg) in frames.iter().enumerate() {
                std::fs::write(output.join(format!("frame_{i:0digits$}.svg")), svg)?;
            }
            Ok(())
        }
        Command::State { action: StateAction::Encode { locus, look, speed } } => {
            let state = ExperimentState {
                schema_version: SCHEMA_VERSION,
                family: locus.family,
                a: locus.a,
                b: locus.b,
                free: locus.free,
                target: locus.target(),
                derived: locus.derived,
                samples: locus.samples,
                style: look.style,
                palette_seed: look.seed,
                speed,
            };
            state.validate()?;
            write_output(None, &(encode(&state) + "\n"))
        }
        Command::State { action: StateAction::Decode { blob } } => {
            let state = decode(&blob)?;
            write_output(None, &(serde_json::to_string(&state).expect("serializable") + "\n"))
        }
        Command::Serve { port, static_dir } => {
            let port = match std::env::var("PONCELET_PORT") {
                Ok(v) => v
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("PONCELET_PORT must be a port number, got {v:?}")))?,
                Err(_) => port,
            };
            crate::server::serve(port, static_dir)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn target_group_is_required() {
        let e =
            Cli::try_parse_from(["poncelet", "classify", "--family", "confocal", "-a", "2", "-b", "1"]).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::MissingRequiredArgument);
    }

    #[test]
    fn bad_value_names_the_flag() {
        let e =
            Cli::try_parse_from(["poncelet", "classify", "--family", "oval", "-a", "2", "-b", "1", "--center", "1"])
                .unwrap_err();
        let v = usage_error(&e);
        assert_eq!(v["flag"], "--family <FAMILY>");
        assert_eq!(v["code"], "UsageError");
    }
}
