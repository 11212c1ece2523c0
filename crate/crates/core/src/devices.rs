//! Devices connect the state tree to the outside world.
//!
//! An input device is a mount path whose contents are read from the
//! environment on every access; an output device turns values written to
//! its mount into effects. The environment is injected, so runs against a
//! [`ScriptedEnvironment`] are fully deterministic.

use std::collections::VecDeque;
use std::io::BufRead;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::scalar::Natural;
use crate::tree::{Label, Node, Path, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceKind {
    Clock,
    StdinLine,
    Stdout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceBinding {
    pub mount: Path,
    pub direction: Direction,
    pub kind: DeviceKind,
}

/// What devices talk to.
pub trait Environment: Send {
    fn now_millis(&mut self) -> u64;
    fn read_line(&mut self) -> Option<String>;
    fn write_line(&mut self, line: &str);
}

/// The process clock, stdin and stdout.
#[derive(Debug, Default)]
pub struct SystemEnvironment {
    last_millis: u64,
}

impl Environment for SystemEnvironment {
    fn now_millis(&mut self) -> u64 {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        // wall clock may step backwards; reads must not
        self.last_millis = self.last_millis.max(now);
        self.last_millis
    }

    fn read_line(&mut self) -> Option<String> {
        let mut line = String::new();
        match std::io::stdin().lock().read_line(&mut line) {
            Ok(0) | Err(_) => None,
            Ok(_) => {
                let trimmed = line.strip_suffix('\n').unwrap_or(&line);
                Some(trimmed.strip_suffix('\r').unwrap_or(trimmed).to_string())
            }
        }
    }

    fn write_line(&mut self, line: &str) {
        println!("{line}");
    }
}

/// A fake environment: a clock advancing by a fixed step per read, a queue
/// of input lines, and a shared buffer collecting output lines.
#[derive(Debug, Clone, Default)]
pub struct ScriptedEnvironment {
    clock: u64,
    tick: u64,
    input: VecDeque<String>,
    output: Arc<Mutex<Vec<String>>>,
}

impl ScriptedEnvironment {
    pub fn new(start_millis: u64, tick: u64) -> Self {
        Self {
            clock: start_millis,
            tick,
            ..Self::default()
        }
    }

    pub fn with_input<I, S>(mut self, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.input.extend(lines.into_iter().map(Into::into));
        self
    }

    /// Handle to the lines written so far.
    pub fn output(&self) -> Arc<Mutex<Vec<String>>> {
        Arc::clone(&self.output)
    }
}

impl Environment for ScriptedEnvironment {
    fn now_millis(&mut self) -> u64 {
        let t = self.clock;
        self.clock += self.tick;
        t
    }

    fn read_line(&mut self) -> Option<String> {
        self.input.pop_front()
    }

    fn write_line(&mut self, line: &str) {
        self.output
            .lock()
            .expect("output buffer")
            .push(line.to_string());
    }
}

fn mount(segments: &[&str]) -> Path {
    segments
        .iter()
        .map(|s| Segment::Name(Label::new(*s).expect("static label")))
        .collect()
}

/// The bound devices of one machine. Immutable after construction.
pub struct DeviceTable {
    bindings: Vec<DeviceBinding>,
    env: Box<dyn Environment>,
}

impl std::fmt::Debug for DeviceTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeviceTable")
            .field("bindings", &self.bindings)
            .finish_non_exhaustive()
    }
}

impl DeviceTable {
    /// `dev.clock`, `dev.stdin` and `dev.stdout` backed by `env`.
    pub fn standard(env: impl Environment + 'static) -> Self {
        let bindings = vec![
            DeviceBinding {
                mount: mount(&["dev", "clock"]),
                direction: Direction::In,
                kind: DeviceKind::Clock,
            },
            DeviceBinding {
                mount: mount(&["dev", "stdin"]),
                direction: Direction::In,
                kind: DeviceKind::StdinLine,
            },
            DeviceBinding {
                mount: mount(&["dev", "stdout"]),
                direction: Direction::Out,
                kind: DeviceKind::Stdout,
            },
        ];
        Self {
            bindings,
            env: Box::new(env),
        }
    }

    /// A table with no devices; every device access is unbound.
    pub fn empty() -> Self {
        Self {
            bindings: Vec::new(),
            env: Box::new(ScriptedEnvironment::default()),
        }
    }

    /// Custom bindings; mounts must not overlap.
    pub fn with_bindings(
        bindings: Vec<DeviceBinding>,
        env: impl Environment + 'static,
    ) -> Result<Self> {
        for (i, a) in bindings.iter().enumerate() {
            for b in &bindings[i + 1..] {
                if a.mount.is_prefix_of(&b.mount) || b.mount.is_prefix_of(&a.mount) {
                    return Err(Error::InvalidLabel(format!(
                        "overlapping device mounts `{}` and `{}`",
                        a.mount, b.mount
                    )));
                }
            }
        }
        Ok(Self {
            bindings,
            env: Box::new(env),
        })
    }

    pub fn bindings(&self) -> &[DeviceBinding] {
        &self.bindings
    }

    pub fn binding(&self, path: &Path) -> Option<&DeviceBinding> {
        self.bindings.iter().find(|b| &b.mount == path)
    }

    pub fn is_input(&self, path: &Path) -> bool {
        self.binding(path)
            .is_some_and(|b| b.direction == Direction::In)
    }

    pub fn is_output(&self, path: &Path) -> bool {
        self.binding(path)
            .is_some_and(|b| b.direction == Direction::Out)
    }

    pub fn read<N: Natural>(&mut self, mount: &Path) -> Result<Node<N>> {
        let binding = self
            .binding(mount)
            .filter(|b| b.direction == Direction::In)
            .ok_or_else(|| Error::UnboundDevice(mount.clone()))?;
        match binding.kind {
            DeviceKind::Clock => {
                let ms = self.env.now_millis();
                N::from_u64(ms).map(Node::Leaf).ok_or(Error::Overflow)
            }
            DeviceKind::StdinLine => {
                let line = self.env.read_line().ok_or(Error::EndOfInput)?;
                line.chars()
                    .map(|c| N::from_char(c).map(Node::Leaf).ok_or(Error::Overflow))
                    .collect::<Result<Vec<_>>>()
                    .map(Node::sequence)
            }
            DeviceKind::Stdout => Err(Error::UnboundDevice(mount.clone())),
        }
    }

    pub fn write<N: Natural>(&mut self, mount: &Path, value: &Node<N>) -> Result<()> {
        let binding = self
            .binding(mount)
            .filter(|b| b.direction == Direction::Out)
            .ok_or_else(|| Error::UnboundDevice(mount.clone()))?;
        debug_assert_eq!(binding.kind, DeviceKind::Stdout);
        let line = encode_text(value)?;
        self.env.write_line(&line);
        Ok(())
    }
}

/// Text rendering for output devices: decimal for a leaf, decoded
/// characters for a string-shaped set (the empty set is the empty line).
pub fn encode_text<N: Natural>(value: &Node<N>) -> Result<String> {
    match value {
        Node::Leaf(n) => Ok(n.to_string()),
        Node::Set(s) if s.op.is_none() && s.is_empty() => Ok(String::new()),
        Node::Set(_) => value.as_string().ok_or(Error::NotEncodable),
        Node::Ref(_) | Node::Var(_) => Err(Error::NotEncodable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type V = Node<u64>;

    fn p(s: &str) -> Path {
        Path::parse(s).unwrap()
    }

    #[test]
    fn clock_is_monotonic() {
        let mut table = DeviceTable::standard(SystemEnvironment::default());
        let r1: V = table.read(&p("dev.clock")).unwrap();
        let r2: V = table.read(&p("dev.clock")).unwrap();
        assert!(r1.as_leaf().unwrap() <= r2.as_leaf().unwrap());
    }

    #[test]
    fn scripted_stdin() {
        let mut table = DeviceTable::standard(ScriptedEnvironment::default().with_input(["hi"]));
        let line: V = table.read(&p("dev.stdin")).unwrap();
        assert_eq!(
            line,
            Node::sequence([Node::leaf(104u64), Node::leaf(105u64)])
        );
        assert!(matches!(
            table.read::<u64>(&p("dev.stdin")),
            Err(Error::EndOfInput)
        ));
    }

    #[test]
    fn direction_is_enforced() {
        let mut table = DeviceTable::standard(ScriptedEnvironment::default());
        assert!(matches!(
            table.read::<u64>(&p("dev.stdout")),
            Err(Error::UnboundDevice(_))
        ));
        assert!(matches!(
            table.write(&p("dev.clock"), &V::leaf(1u64)),
            Err(Error::UnboundDevice(_))
        ));
        assert!(matches!(
            table.read::<u64>(&p("dev.mouse")),
            Err(Error::UnboundDevice(_))
        ));
    }

    #[test]
    fn stdout_encoding() {
        let env = ScriptedEnvironment::default();
        let out = env.output();
        let mut table = DeviceTable::standard(env);
        table.write(&p("dev.stdout"), &V::leaf(42u64)).unwrap();
        table.write(&p("dev.stdout"), &V::string("ok")).unwrap();
        let nested = V::record([
            ("a", Node::leaf(1u64)),
            ("b", V::record([("c", Node::leaf(2u64))])),
        ]);
        assert!(matches!(
            table.write(&p("dev.stdout"), &nested),
            Err(Error::NotEncodable)
        ));
        assert_eq!(
            *out.lock().unwrap(),
            vec!["42".to_string(), "ok".to_string()]
        );
    }

    #[test]
    fn overlapping_mounts_rejected() {
        let b = |m: &str| DeviceBinding {
            mount: p(m),
            direction: Direction::In,
            kind: DeviceKind::Clock,
        };
        assert!(DeviceTable::with_bindings(
            vec![b("dev.a"), b("dev.a.b")],
            ScriptedEnvironment::default()
        )
        .is_err());
        assert!(DeviceTable::with_bindings(
            vec![b("dev.a"), b("dev.b")],
            ScriptedEnvironment::default()
        )
        .is_ok());
    }
}
