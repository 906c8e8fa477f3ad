//! Line-oriented instruction loop with an undo stack.
//!
//! Every line read and every line printed is also appended to
//! `transcript.log` in the output directory.

use std::fs::File;
use std::io::{BufRead, Write};
use std::path::Path;

use programport::world::{render, Scene};

use crate::{ensure_dir, CliError, CliResult, Pipeline};

struct Session<'a, W: Write> {
    history: Vec<Scene>,
    out: &'a mut W,
    transcript: File,
    renders: usize,
}

impl<W: Write> Session<'_, W> {
    fn current(&self) -> &Scene {
        self.history.last().expect("history starts non-empty")
    }

    fn say(&mut self, line: &str) -> CliResult<()> {
        writeln!(self.out, "{line}").map_err(CliError::io)?;
        writeln!(self.transcript, "{line}").map_err(CliError::io)
    }

    fn object_table(&mut self) -> CliResult<()> {
        let rows: Vec<String> = self
            .current()
            .objects
            .iter()
            .map(|o| {
                format!(
                    "{:>3} {:<9} {:<9} {:<7} {:>7.2} {:>7.2} {:>6.2}",
                    o.id,
                    format!("{:?}", o.kind).to_lowercase(),
                    o.shape.name(),
                    o.color.name(),
                    o.x,
                    o.y,
                    o.angle
                )
            })
            .collect();
        self.say(&format!("{:>3} {:<9} {:<9} {:<7} {:>7} {:>7} {:>6}", "id", "kind", "shape", "color", "x", "y", "angle"))?;
        for r in rows {
            self.say(&r)?;
        }
        Ok(())
    }
}

/// Runs the loop until `:quit` or end of input. Per-line failures are
/// reported and the session continues; only output errors end it.
pub fn run(scene: Scene, pipeline: &Pipeline, input: impl BufRead, out: &mut impl Write, dir: &Path) -> CliResult<()> {
    ensure_dir(dir)?;
    let transcript = File::create(dir.join("transcript.log")).map_err(CliError::io)?;
    let mut s = Session {
        history: vec![scene],
        out,
        transcript,
        renders: 0,
    };
    for line in input.lines() {
        let line = line.map_err(CliError::io)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        writeln!(s.transcript, "> {line}").map_err(CliError::io)?;
        match line {
            ":quit" => break,
            ":undo" => {
                if s.history.len() > 1 {
                    s.history.pop();
                    s.say("undone")?;
                    s.object_table()?;
                } else {
                    s.say("error: nothing to undo")?;
                }
            }
            ":render" => {
                s.renders += 1;
                let path = dir.join(format!("render_{:03}.ppm", s.renders));
                match render(s.current()).and_then(|r| r.write_ppm(&path)) {
                    Ok(()) => s.say(&format!("wrote {}", path.display()))?,
                    Err(e) => s.say(&format!("error: {e}"))?,
                }
            }
            ":objects" => s.object_table()?,
            cmd if cmd.starts_with(':') => s.say(&format!("error: unknown command {cmd}"))?,
            instruction => match pipeline.run(s.current(), instruction) {
                Ok(outcome) => {
                    s.say(&format!("program: {}", outcome.program))?;
                    for (i, p) in outcome.result.plan().iter().enumerate() {
                        s.say(&format!(
                            "step {i}: {:?} pick ({}, {}) place ({}, {}, r{})",
                            p.primitive, p.pick.u, p.pick.v, p.place.u, p.place.v, p.place.r
                        ))?;
                    }
                    s.history.push(outcome.after);
                    s.object_table()?;
                }
                Err(e) => s.say(&format!("error: {}", e.message))?,
            },
        }
    }
    Ok(())
}
