use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, Command};
use isophote::io::{exit, parse_scene, run_scene, scene_from_tokens, serialize_scene, RunError, RunOptions};

const VERB_HELP: &[(&str, &str)] = &[
    (
        "trace",
        "trace <surface> d=x,y,z theta=<deg|rad> [grid=NxM] [polish=true]",
    ),
    ("silhouette", "silhouette <surface> d=x,y,z [grid=NxM]"),
    ("axis", "axis curve=<id> | <surface> d=.. theta=..: recover the axis"),
    ("mu", "mu curve=<id> | <surface> d=.. theta=..: the mu invariant"),
    (
        "classify",
        "classify curve=<id> | <surface> d=.. theta=..: isophote family",
    ),
    (
        "gauss-map",
        "gauss-map curve=<id> | <surface> d=.. theta=..: Gauss-map circle test",
    ),
    (
        "canal",
        "canal <tube-or-canal id> [samples=N] [mesh=NxM]: envelope checks and OBJ mesh",
    ),
    (
        "tube",
        "tube <spine> [r=0.3] [branch=minus|plus]: parameter curves that are isophotes",
    ),
    (
        "radius-law",
        "radius-law <cor3a|cor3b|prop1> theta=.. v=.. [beta=..] [phi=..] [sign=-1|1] [sweep=N]",
    ),
    (
        "verify-theorem4",
        "verify-theorem4 [spine] [r=0.3] [jitter=0.05rad]: canal identity on tube isophotes",
    ),
    (
        "verify-prop2",
        "verify-prop2 [spine=circular_helix] [r=0.3]: tube curves at v0 = pi/2, 3pi/2",
    ),
    (
        "verify-prop3",
        "verify-prop3 [spine=slant_helix] [r=0.2]: tube curves at v0 = 0, pi",
    ),
    (
        "example1",
        "example1 [a=2] [b=1]: the slant helix on its rectifying developable",
    ),
];

const EXIT_HELP: &str = "Exit codes: 0 all checks pass, 1 a verification check failed, \
2 usage or scene-file error, 3 geometry error (degenerate or out-of-domain input), 4 file I/O error.\n\
Artifacts go to --out, else $ISOPHOTE_OUT, else ./isophote-out, in a timestamped subdirectory.";

fn cli() -> Command {
    let mut cmd = Command::new("isophote")
        .about("Isophote curves on parametric surfaces")
        .after_help(EXIT_HELP)
        .subcommand_required(true)
        .arg(
            Arg::new("out")
                .long("out")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("output root directory"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .default_value("0")
                .value_parser(value_parser!(u64))
                .help("seed for randomized sampling"),
        )
        .arg(
            Arg::new("quiet")
                .long("quiet")
                .short('q')
                .global(true)
                .action(ArgAction::SetTrue)
                .help("print only the output directory"),
        )
        .subcommand(
            Command::new("run")
                .about("run every job of a scene file")
                .arg(Arg::new("scene").required(true).value_parser(value_parser!(PathBuf))),
        )
        .subcommand(
            Command::new("check")
                .about("validate a scene file and print its canonical form")
                .arg(Arg::new("scene").required(true).value_parser(value_parser!(PathBuf))),
        );
    for (verb, about) in VERB_HELP {
        cmd = cmd.subcommand(Command::new(*verb).about(*about).arg(Arg::new("args").num_args(0..)));
    }
    cmd
}

fn main() -> ExitCode {
    let m = cli().get_matches();
    let opts = RunOptions {
        out_root: m.get_one::<PathBuf>("out").cloned(),
        seed: *m.get_one::<u64>("seed").expect("defaulted"),
    };
    let quiet = m.get_flag("quiet");
    let (name, sub) = m.subcommand().expect("subcommand required");
    let config = match name {
        "run" | "check" => {
            let path = sub.get_one::<PathBuf>("scene").expect("required");
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(exit::IO as u8);
                }
            };
            parse_scene(&text).inspect_err(|_| eprintln!("{}:", path.display()))
        }
        verb => {
            let toks: Vec<String> = sub
                .get_many::<String>("args")
                .map(|v| v.cloned().collect())
                .unwrap_or_default();
            scene_from_tokens(verb, &toks)
        }
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    if name == "check" {
        print!("{}", serialize_scene(&config));
        return ExitCode::SUCCESS;
    }
    match run_scene(&config, &opts) {
        Ok(out) => {
            if !quiet {
                print!("{}", out.report.to_text());
            }
            println!("output: {}", out.out_dir.display());
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(RunError::exit_code(&e) as u8)
        }
    }
}
