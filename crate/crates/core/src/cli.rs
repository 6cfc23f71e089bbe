//! The `sculpt` command line.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::content::PadMode;
use crate::events::{event_stream, DocumentEvents, TableEvent};
use crate::guard::GuardOptions;
use crate::stream::{StreamMode, StreamOptions, StreamValidator};
use crate::tokens::CellTokens;
use crate::validator::{Schema, ValidateOptions};

pub const EXIT_VALID: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sculpt", version, about = "Validate tabular documents against SCULPT schemas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Memory,
    StreamWeak,
    StreamStrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pad {
    Trim,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a table against a schema.
    Validate {
        #[arg(long, value_enum, default_value = "memory")]
        mode: Mode,
        /// How padding cells at the end of a selected sequence are matched.
        #[arg(long, value_enum, default_value = "trim")]
        pad: Pad,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
        /// Write per-row memory usage of a stream run to this file.
        #[arg(long, value_name = "FILE")]
        trace_memory: Option<PathBuf>,
        /// Read the right-star guardedness case as yielding row-guarded only.
        #[arg(long)]
        strict_guard_text: bool,
        schema: PathBuf,
        /// Table file, or `-` for standard input.
        table: PathBuf,
    },
    /// Classify each rule as forward and/or guarded.
    Analyze {
        #[arg(long)]
        strict_guard_text: bool,
        schema: PathBuf,
    },
    /// Print the cells an expression selects, one `(row,col)` per line.
    Select {
        #[arg(short = 'e', long = "expr")]
        expr: String,
        /// Take token definitions, types and delimiters from this schema.
        #[arg(long)]
        schema: Option<PathBuf>,
        table: PathBuf,
    },
    /// Print the schema with sugar and token types expanded.
    Desugar { schema: PathBuf },
    /// Print the token event stream of a table.
    Events { schema: PathBuf, table: PathBuf },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

fn read_input(path: &Path, io: &mut Io<'_>) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    if path == Path::new("-") {
        io.stdin
            .read_to_end(&mut buf)
            .map_err(|e| format!("reading standard input: {e}"))?;
    } else {
        buf = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(buf)
}

fn read_schema(path: &Path, io: &mut Io<'_>) -> Result<String, String> {
    let bytes = read_input(path, io)?;
    String::from_utf8(bytes).map_err(|e| format!("{}: schema is not UTF-8: {e}", path.display()))
}

fn load_schema(path: &Path, io: &mut Io<'_>) -> Result<Schema, String> {
    let src = read_schema(path, io)?;
    Schema::parse(&src).map_err(|e| format!("{}: {e}", path.display()))
}

fn as_text(bytes: &[u8]) -> Result<&str, String> {
    std::str::from_utf8(bytes).map_err(|e| crate::error::ParseError::Encoding { offset: e.valid_up_to() }.to_string())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_VALID };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<i32, String> {
    match cmd {
        Command::Validate {
            mode,
            pad,
            output,
            trace_memory,
            strict_guard_text,
            schema,
            table,
        } => {
            let schema = load_schema(&schema, io)?;
            let pad = match pad {
                Pad::Trim => PadMode::Trim,
                Pad::Literal => PadMode::Literal,
            };
            let bytes = read_input(&table, io)?;
            let report = match mode {
                Mode::Memory => {
                    if trace_memory.is_some() {
                        return Err("--trace-memory needs --mode stream-weak or stream-strong".into());
                    }
                    let t = schema.read_table(&bytes).map_err(|e| e.to_string())?;
                    schema.validate(&t, ValidateOptions { pad })
                }
                Mode::StreamWeak | Mode::StreamStrong => {
                    let opts = StreamOptions {
                        mode: if mode == Mode::StreamWeak {
                            StreamMode::Weak
                        } else {
                            StreamMode::Strong
                        },
                        pad,
                        guard: GuardOptions { strict_guard_text },
                    };
                    let mut v = StreamValidator::new(&schema, &opts).map_err(|e| e.to_string())?;
                    let text = as_text(&bytes)?;
                    for ev in DocumentEvents::new(text, schema.delimiters(), schema.token_defs()) {
                        v.feed(&ev).map_err(|e| e.to_string())?;
                    }
                    let (report, trace) = v.finish();
                    if let Some(p) = trace_memory {
                        std::fs::write(&p, trace.render()).map_err(|e| format!("{}: {e}", p.display()))?;
                    }
                    report
                }
            };
            let text = match output {
                Output::Text => report.render_text(),
                Output::Machine => report.render_machine(),
            };
            io.stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
            Ok(if report.is_valid() { EXIT_VALID } else { EXIT_INVALID })
        }
        Command::Analyze {
            strict_guard_text,
            schema,
        } => {
            let schema = load_schema(&schema, io)?;
            let report = schema.analyze(&GuardOptions { strict_guard_text });
            io.stdout
                .write_all(report.render().as_bytes())
                .map_err(|e| e.to_string())?;
            Ok(EXIT_VALID)
        }
        Command::Select { expr, schema, table } => {
            let mut src = match &schema {
                Some(p) => read_schema(p, io)?,
                None => String::new(),
            };
            if !src.is_empty() && !src.ends_with('\n') {
                src.push('\n');
            }
            // the expression rides along as one more rule, so it gets the
            // schema's token types and implicit literal tokens for free
            src.push_str(&format!("{expr} -> True*\n"));
            let schema = Schema::parse(&src).map_err(|e| format!("expression or schema: {e}"))?;
            let bytes = read_input(&table, io)?;
            let t = schema.read_table(&bytes).map_err(|e| e.to_string())?;
            let rule = schema.rules().last().expect("expression rule");
            let mut out = String::new();
            for c in rule.program.eval(&t).iter() {
                out.push_str(&format!("{c}\n"));
            }
            io.stdout.write_all(out.as_bytes()).map_err(|e| e.to_string())?;
            Ok(EXIT_VALID)
        }
        Command::Desugar { schema } => {
            let schema = load_schema(&schema, io)?;
            let mut core = schema.core().clone();
            core.token_types.clear();
            io.stdout
                .write_all(core.to_string().as_bytes())
                .map_err(|e| e.to_string())?;
            Ok(EXIT_VALID)
        }
        Command::Events { schema, table } => {
            let schema = load_schema(&schema, io)?;
            let bytes = read_input(&table, io)?;
            let t = schema.read_table(&bytes).map_err(|e| e.to_string())?;
            let vocab = t.vocabulary().clone();
            let mut out = String::new();
            let (mut k, mut l) = (1, 0);
            for ev in event_stream(&t) {
                match ev {
                    TableEvent::NewRow => {
                        k += 1;
                        l = 0;
                        out.push_str("newrow\n");
                    }
                    TableEvent::Cell(c) => {
                        l += 1;
                        let body = match &c {
                            CellTokens::Null => "null".to_string(),
                            CellTokens::Tokens(ts) => ts.iter().map(|id| vocab.name(id)).collect::<Vec<_>>().join(" "),
                        };
                        out.push_str(&format!("({k},{l}) {body}\n"));
                    }
                }
            }
            io.stdout.write_all(out.as_bytes()).map_err(|e| e.to_string())?;
            Ok(EXIT_VALID)
        }
    }
}
