use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evocat::devices::{DeviceTable, Environment, SystemEnvironment};
use evocat::tree::{Node, SetNode};
use evocat::{parse, print, print_node, Error, Label, Machine, Nat, Path, Segment, StateTree};

#[derive(Parser)]
#[command(
    name = "evocat",
    version,
    about = "Run programs on a tree-state machine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Call a function template and print its result.
    Run(RunArgs),
    /// Like `run`, printing one line per transition first.
    Trace(RunArgs),
    /// Print a file in canonical form.
    Fmt { file: PathBuf },
    /// Parse a file and report errors only.
    Check { file: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// State file.
    state: PathBuf,
    /// Program files, merged under the root of the state.
    programs: Vec<PathBuf>,
    /// Path of the function template to call.
    #[arg(long)]
    entry: String,
    /// Argument binding `label=literal`; repeatable.
    #[arg(long = "arg", value_name = "LABEL=LITERAL")]
    args: Vec<String>,
    #[arg(long, default_value_t = evocat::DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    /// Write the final state here (`-` for standard output).
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Start `dev.clock` at this many milliseconds and advance it by one per read.
    #[arg(long, value_name = "MS")]
    clock: Option<u64>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn load(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn setup(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(err: &Error) -> Self {
        let code = match err.root_cause() {
            Error::MissingArgument(_) | Error::UnknownArgument(_) | Error::NotATemplate(_) => 2,
            _ => 3,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

/// System stdin and stdout with an optionally scripted clock.
struct CliEnvironment {
    clock: Option<u64>,
    system: SystemEnvironment,
}

impl Environment for CliEnvironment {
    fn now_millis(&mut self) -> u64 {
        match self.clock.as_mut() {
            Some(t) => {
                *t += 1;
                *t - 1
            }
            None => self.system.now_millis(),
        }
    }

    fn read_line(&mut self) -> Option<String> {
        self.system.read_line()
    }

    fn write_line(&mut self, line: &str) {
        self.system.write_line(line)
    }
}

fn load(file: &PathBuf) -> Result<StateTree, Failure> {
    let src = std::fs::read_to_string(file)
        .map_err(|e| Failure::load(format!("{}: {e}", file.display())))?;
    parse(&src).map_err(|e| Failure::load(format!("{}: {e}", file.display())))
}

fn merge(into: &mut StateTree, file: &PathBuf) -> Result<(), Failure> {
    let program = load(file)?;
    let Node::Set(SetNode { op: None, children }) = program.root else {
        return Err(Failure::load(format!(
            "{}: not a set of entries",
            file.display()
        )));
    };
    let Some(root) = into.root.as_set_mut() else {
        return Err(Failure::load("state root is not a set"));
    };
    for child in children {
        let label = child
            .key
            .name()
            .map(ToString::to_string)
            .unwrap_or_default();
        root.push(child.key, child.node).map_err(|_| {
            Failure::load(format!(
                "{}: duplicate top-level label `{label}`",
                file.display()
            ))
        })?;
    }
    Ok(())
}

fn parse_arg(binding: &str) -> Result<(Label, Node<Nat>), Failure> {
    let bad = || Failure::setup(format!("bad argument `{binding}`, expected label=literal"));
    let (label, literal) = binding.split_once('=').ok_or_else(bad)?;
    let label = Label::new(label.trim()).map_err(|_| bad())?;
    let tree: StateTree = parse(&format!("{label} = {literal}"))
        .or_else(|_| parse(&format!("{label} {literal}")))
        .map_err(|e| Failure::setup(format!("argument `{label}`: {e}")))?;
    let node = tree
        .root
        .as_set()
        .and_then(|s| s.children.first())
        .map(|c| c.node.clone())
        .ok_or_else(bad)?;
    Ok((label, node))
}

fn run(args: RunArgs, trace: bool) -> Result<(), Failure> {
    let mut tree = load(&args.state)?;
    for program in &args.programs {
        merge(&mut tree, program)?;
    }
    let bindings = args
        .args
        .iter()
        .map(|a| parse_arg(a))
        .collect::<Result<Vec<_>, _>>()?;
    let entry = Path::parse(&args.entry)
        .map_err(|e| Failure::setup(format!("bad entry `{}`: {e}", args.entry)))?;
    let instance = entry
        .parent()
        .ok_or_else(|| Failure::setup("entry must name a template, not the root"))?
        .child(Segment::Name(Label::new("main").expect("label")));

    let env = CliEnvironment {
        clock: args.clock,
        system: SystemEnvironment::default(),
    };
    let mut machine = Machine::new(tree)
        .with_fuel(args.fuel)
        .with_devices(DeviceTable::standard(env));
    if trace {
        machine = machine.with_tracer(|event| println!("{event}"));
    }
    if !evocat::eval::is_template(
        machine
            .resolve(&entry)
            .ok_or_else(|| Failure::setup(format!("entry `{entry}` does not resolve")))?,
    ) {
        return Err(Failure::setup(format!(
            "entry `{entry}` is not a function template"
        )));
    }
    machine
        .instantiate_at(&entry, &instance)
        .and_then(|_| machine.assign_args(&instance, bindings))
        .map_err(|e| Failure::setup(e.to_string()))?;
    let value = machine.call(&instance).map_err(|e| Failure::runtime(&e))?;
    println!("{}", print_node(&value));

    if let Some(dump) = args.dump {
        let text = print(machine.tree());
        if dump.as_os_str() == "-" {
            print!("{text}");
        } else {
            std::fs::write(&dump, text).map_err(|e| Failure {
                code: 3,
                message: format!("{}: {e}", dump.display()),
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args, false),
        Command::Trace(args) => run(args, true),
        Command::Fmt { file } => load(&file).map(|t| print!("{}", print(&t))),
        Command::Check { file } => load(&file).map(|_| ()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("evocat: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
