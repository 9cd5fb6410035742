//! Scriptable sessions: command parsing, execution, rendering and
//! persistence.
//!
//! A session holds one epistemic state and a cache of its fixpoint, valid
//! until the state changes. Commands are pure dispatches into the engines; a
//! failing command leaves the session untouched. Every command renders both
//! a human-readable block and one machine-mode JSON document of the shape
//! `{"command": ..., "data": ..., "status": ...}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::axioms::background_axioms;
use crate::error::EngineError;
use crate::extension::{base_names, Context};
use crate::fixpoint::{least_fixpoint, preferred_extensions, FixpointResult};
use crate::oracle::Caps;
use crate::parser::{parse_formula, parse_term, ParseError};
use crate::revision::{
    check_postulates, contract, revise, EpistemicState, HistoryEntry, OpKind,
};
use crate::theory::GroundTheory;

/// A REPL or script command. Every command round-trips through its textual
/// form: `Command::parse(&cmd.to_line())` reproduces it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Load(String),
    Revise(String),
    Contract(String),
    Query(String),
    Extensions(Scope),
    Preferred,
    AcceptedBases,
    Trace,
    Postulates(String, String),
    Save(String),
    Show(String),
    Set(String, String),
    Help,
    Quit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Compatible,
}

impl Command {
    /// Parse one command line. Empty lines and `#` comments yield `None`.
    pub fn parse(line: &str) -> Result<Option<Command>, String> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(None);
        }
        let (word, rest) = match line.split_once(char::is_whitespace) {
            Some((w, r)) => (w, r.trim()),
            None => (line, ""),
        };
        let need = |what: &str| -> Result<String, String> {
            if rest.is_empty() {
                Err(format!("`{word}` needs {what}"))
            } else {
                Ok(rest.to_string())
            }
        };
        let cmd = match word {
            "load" => Command::Load(need("a file path")?),
            "revise" => Command::Revise(need("a formula")?),
            "contract" => Command::Contract(need("a formula")?),
            "query" => Command::Query(need("a formula")?),
            "extensions" => match rest {
                "all" => Command::Extensions(Scope::All),
                "compatible" => Command::Extensions(Scope::Compatible),
                other => {
                    return Err(format!(
                        "`extensions` takes `all` or `compatible`, not `{other}`"
                    ))
                }
            },
            "preferred" => Command::Preferred,
            "accepted-bases" => Command::AcceptedBases,
            "trace" => Command::Trace,
            "postulates" => {
                let args = need("two formulas separated by `;`")?;
                let (a, b) = args
                    .split_once(';')
                    .ok_or("`postulates` takes two formulas separated by `;`")?;
                Command::Postulates(a.trim().to_string(), b.trim().to_string())
            }
            "save" => Command::Save(need("a file path")?),
            "show" => Command::Show(need("a name")?),
            "set" => {
                let args = need("an option and a value")?;
                let (k, v) = args
                    .split_once(char::is_whitespace)
                    .ok_or("`set` takes an option and a value")?;
                Command::Set(k.trim().to_string(), v.trim().to_string())
            }
            "help" => Command::Help,
            "quit" | "exit" => Command::Quit,
            other => return Err(format!("unknown command `{other}`; try `help`")),
        };
        Ok(Some(cmd))
    }

    /// The textual form this command parses back from.
    pub fn to_line(&self) -> String {
        match self {
            Command::Load(p) => format!("load {p}"),
            Command::Revise(f) => format!("revise {f}"),
            Command::Contract(f) => format!("contract {f}"),
            Command::Query(f) => format!("query {f}"),
            Command::Extensions(Scope::All) => "extensions all".into(),
            Command::Extensions(Scope::Compatible) => "extensions compatible".into(),
            Command::Preferred => "preferred".into(),
            Command::AcceptedBases => "accepted-bases".into(),
            Command::Trace => "trace".into(),
            Command::Postulates(a, b) => format!("postulates {a} ; {b}"),
            Command::Save(p) => format!("save {p}"),
            Command::Show(n) => format!("show {n}"),
            Command::Set(k, v) => format!("set {k} {v}"),
            Command::Help => "help".into(),
            Command::Quit => "quit".into(),
        }
    }

    fn word(&self) -> &'static str {
        match self {
            Command::Load(_) => "load",
            Command::Revise(_) => "revise",
            Command::Contract(_) => "contract",
            Command::Query(_) => "query",
            Command::Extensions(_) => "extensions",
            Command::Preferred => "preferred",
            Command::AcceptedBases => "accepted-bases",
            Command::Trace => "trace",
            Command::Postulates(..) => "postulates",
            Command::Save(_) => "save",
            Command::Show(_) => "show",
            Command::Set(..) => "set",
            Command::Help => "help",
            Command::Quit => "quit",
        }
    }
}

/// Stable error categories with fixed exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Engine,
    Parse,
    ResourceCap,
}

impl ErrorCode {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCode::Engine => 1,
            ErrorCode::Parse => 2,
            ErrorCode::ResourceCap => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Engine => "engine-error",
            ErrorCode::Parse => "parse-error",
            ErrorCode::ResourceCap => "resource-cap",
        }
    }
}

/// The result of executing one command.
#[derive(Debug, Clone)]
pub struct Output {
    pub command: String,
    pub error: Option<ErrorCode>,
    pub data: Value,
    pub human: String,
    pub quit: bool,
}

impl Output {
    fn ok(command: &str, data: Value, human: String) -> Output {
        Output { command: command.into(), error: None, data, human, quit: false }
    }

    fn err(command: &str, code: ErrorCode, message: String) -> Output {
        Output {
            command: command.into(),
            error: Some(code),
            data: json!({ "code": code.as_str(), "message": message }),
            human: format!("error: {message}"),
            quit: false,
        }
    }

    /// One machine-mode JSON document.
    pub fn machine_line(&self) -> String {
        let status = if self.error.is_none() { "ok" } else { "error" };
        serde_json::to_string(&json!({
            "command": self.command,
            "status": status,
            "data": self.data,
        }))
        .expect("JSON rendering cannot fail")
    }
}

fn classify(e: &EngineError) -> ErrorCode {
    match e {
        EngineError::Parse(_) => ErrorCode::Parse,
        EngineError::Ground(_) => ErrorCode::Parse,
        EngineError::ResourceCap { .. } => ErrorCode::ResourceCap,
        _ => ErrorCode::Engine,
    }
}

/// Serialized session file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SessionFile {
    version: u32,
    theory: String,
    history: Vec<HistoryEntry>,
}

/// An interactive or scripted session.
pub struct Session {
    pub state: EpistemicState,
    pub caps: Caps,
    fixpoint_cache: Option<FixpointResult>,
}

impl Session {
    pub fn new() -> Session {
        Session {
            state: EpistemicState::from_spec(Default::default())
                .expect("the empty theory grounds"),
            caps: Caps::default(),
            fixpoint_cache: None,
        }
    }

    pub fn with_state(state: EpistemicState) -> Session {
        Session { state, caps: Caps::default(), fixpoint_cache: None }
    }

    fn replace_state(&mut self, state: EpistemicState) {
        self.state = state;
        self.fixpoint_cache = None;
    }

    fn fixpoint(&mut self) -> Result<&FixpointResult, EngineError> {
        if self.fixpoint_cache.is_none() {
            self.fixpoint_cache = Some(least_fixpoint(&self.state.theory, &self.caps)?);
        }
        Ok(self.fixpoint_cache.as_ref().unwrap())
    }

    /// Execute one command. Errors leave the session unchanged.
    pub fn execute(&mut self, cmd: &Command) -> Output {
        let word = cmd.word();
        match self.dispatch(cmd) {
            Ok(out) => out,
            Err(e) => Output::err(word, classify(&e), e.to_string()),
        }
    }

    fn dispatch(&mut self, cmd: &Command) -> Result<Output, EngineError> {
        let word = cmd.word();
        match cmd {
            Command::Load(path) => {
                let state = load_state(path).map_err(session_err)?;
                let names: Vec<String> =
                    state.theory.signature.names.iter().map(|n| n.to_string()).collect();
                let count = state.theory.formulas.len();
                let replayed = state.history.len();
                self.replace_state(state);
                Ok(Output::ok(
                    word,
                    json!({ "path": path, "formulas": count, "names": names, "replayed": replayed }),
                    format!("loaded {count} formulas from {path}"),
                ))
            }
            Command::Revise(text) => {
                let f = parse_formula(text)?;
                let next = revise(&self.state, &f)?;
                let name = next.history.last().unwrap().name.clone();
                self.replace_state(next);
                Ok(Output::ok(
                    word,
                    json!({ "formula": f.to_string(), "name": name }),
                    format!("revised: {name}: {f}"),
                ))
            }
            Command::Contract(text) => {
                let f = parse_formula(text)?;
                let next = contract(&self.state, &f)?;
                let name = next.history.last().unwrap().name.clone();
                let body = next
                    .theory
                    .formula_by_name(&parse_term(&name)?)
                    .map(|nf| nf.body.to_string())
                    .unwrap_or_default();
                self.replace_state(next);
                Ok(Output::ok(
                    word,
                    json!({ "constraint": body, "name": name }),
                    format!("contracted: constraint {name}: {body}"),
                ))
            }
            Command::Query(text) => {
                let f = parse_formula(text)?;
                let checked = self.state.theory.check_formula(&f)?;
                let ax = background_axioms(&self.state.theory);
                let caps = self.caps;
                let accepted =
                    self.fixpoint()?.accepted_belief().entails(&ax, &checked, &caps)?;
                Ok(Output::ok(
                    word,
                    json!({ "accepted": accepted, "formula": f.to_string() }),
                    format!("accepted: {accepted}"),
                ))
            }
            Command::Extensions(scope) => {
                let bases = match scope {
                    Scope::All => crate::extension::extensions_compatible(
                        &self.state.theory,
                        &Context::Empty,
                        &self.caps,
                    )?,
                    Scope::Compatible => self.fixpoint()?.accepted_bases().to_vec(),
                };
                let names = base_names(&bases);
                let scope_str = match scope {
                    Scope::All => "all",
                    Scope::Compatible => "compatible",
                };
                let mut human = format!("{} extension base(s):", bases.len());
                for b in &names {
                    let _ = write!(human, "\n  {{{}}}", b.join(", "));
                }
                Ok(Output::ok(
                    word,
                    json!({ "bases": names, "count": bases.len(), "scope": scope_str }),
                    human,
                ))
            }
            Command::Preferred => {
                let bases = preferred_extensions(&self.state.theory, &self.caps)?;
                let names = base_names(&bases);
                let mut human = format!("{} preferred extension(s)", bases.len());
                for b in &names {
                    let _ = write!(human, "\n  {{{}}}", b.join(", "));
                }
                Ok(Output::ok(
                    word,
                    json!({ "bases": names, "count": bases.len() }),
                    human,
                ))
            }
            Command::AcceptedBases => {
                let bases = self.fixpoint()?.accepted_bases().to_vec();
                let names = base_names(&bases);
                let mut human = format!("{} accepted base(s):", bases.len());
                for b in &names {
                    let _ = write!(human, "\n  {{{}}}", b.join(", "));
                }
                Ok(Output::ok(word, json!({ "bases": names, "count": bases.len() }), human))
            }
            Command::Trace => {
                let fp = self.fixpoint()?;
                let counts = fp.base_counts();
                let steps = fp.steps;
                let mut human = String::from("fixpoint trace:");
                for (i, c) in counts.iter().enumerate() {
                    let _ = write!(human, "\n  step {}: {} base(s)", i + 1, c);
                }
                let _ = write!(human, "\n  fixed point after {steps} productive step(s)");
                Ok(Output::ok(
                    word,
                    json!({ "counts": counts, "fixpoint": true, "steps": steps }),
                    human,
                ))
            }
            Command::Postulates(a_text, b_text) => {
                let a = parse_formula(a_text)?;
                let b = parse_formula(b_text)?;
                let report = check_postulates(&self.state, &a, &b, &[], &self.caps)?;
                let mut human = format!("postulates with A = {a}, B = {b}:");
                for e in &report.entries {
                    let status = match e.status {
                        crate::revision::PostulateStatus::HoldsOnInstance => "holds-on-instance",
                        crate::revision::PostulateStatus::FailsOnInstance => "fails-on-instance",
                        crate::revision::PostulateStatus::NotApplicable => "not-applicable",
                    };
                    let _ = write!(human, "\n  {}: {}", e.id, status);
                    if let Some(w) = &e.witness {
                        let _ = write!(
                            human,
                            " (witness {} is in {} but not in {})",
                            w.formula, w.in_side, w.out_side
                        );
                    }
                }
                Ok(Output::ok(
                    word,
                    serde_json::to_value(&report).expect("report serializes"),
                    human,
                ))
            }
            Command::Save(path) => {
                save_state(&self.state, path).map_err(session_err)?;
                Ok(Output::ok(
                    word,
                    json!({ "path": path }),
                    format!("session saved to {path}"),
                ))
            }
            Command::Show(name_text) => {
                let name = parse_term(name_text)?;
                let nf = self.state.theory.formula_by_name(&name).ok_or_else(|| {
                    EngineError::Ground(crate::error::GroundError::UnknownName {
                        name: name.to_string(),
                    })
                })?;
                Ok(Output::ok(
                    word,
                    json!({
                        "formula": nf.body.to_string(),
                        "name": nf.name.to_string(),
                        "role": nf.role.to_string(),
                    }),
                    format!("{} {}: {}", nf.role, nf.name, nf.body),
                ))
            }
            Command::Set(key, value) => {
                let parsed: u64 = value.parse().map_err(|_| {
                    session_err(format!("`set {key}` needs an unsigned integer, got `{value}`"))
                })?;
                match key.as_str() {
                    "max-decisions" => self.caps.max_decisions = parsed,
                    "max-models" => self.caps.max_models = parsed,
                    "max-linearizations" => self.caps.max_linearizations = parsed,
                    other => {
                        return Err(session_err(format!(
                            "unknown option `{other}`; options: max-decisions, max-models, max-linearizations"
                        )))
                    }
                }
                self.fixpoint_cache = None;
                Ok(Output::ok(
                    word,
                    json!({ "option": key, "value": parsed }),
                    format!("set {key} = {parsed}"),
                ))
            }
            Command::Help => {
                let text = HELP.trim_start();
                Ok(Output::ok(word, json!({ "text": text }), text.to_string()))
            }
            Command::Quit => {
                let mut out = Output::ok(word, json!({}), "bye".into());
                out.quit = true;
                Ok(out)
            }
        }
    }

    /// A stable digest of the current state, used by tests to verify that
    /// failed commands change nothing.
    pub fn state_digest(&self) -> String {
        format!("{}\n{:?}", self.state.spec, self.state.history)
    }
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

fn session_err(message: impl Into<String>) -> EngineError {
    EngineError::Parse(ParseError { line: 0, col: 0, message: message.into() })
}

/// Save a state: the initial theory source plus the replayable history.
pub fn save_session(state: &EpistemicState, path: &str) -> Result<(), String> {
    save_state(state, path)
}

fn save_state(state: &EpistemicState, path: &str) -> Result<(), String> {
    let file = SessionFile {
        version: 1,
        theory: state.initial.to_string(),
        history: state.history.clone(),
    };
    let body = serde_json::to_string_pretty(&file)
        .map_err(|e| format!("cannot serialize session: {e}"))?;
    std::fs::write(path, body).map_err(|e| format!("cannot write {path}: {e}"))
}

/// Load either a theory file or a saved session (detected by content).
pub fn load_session(path: &str) -> Result<EpistemicState, String> {
    load_state(path)
}

fn load_state(path: &str) -> Result<EpistemicState, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    if text.trim_start().starts_with('{') {
        replay_session(&text)
    } else {
        EpistemicState::from_source(&text).map_err(|e| format!("in {path}: {e}"))
    }
}

fn replay_session(text: &str) -> Result<EpistemicState, String> {
    let file: SessionFile = serde_json::from_str(text)
        .map_err(|e| format!("malformed session file: {e}"))?;
    if file.version != 1 {
        return Err(format!(
            "malformed session file: section `version`: unsupported version {}",
            file.version
        ));
    }
    let mut state = EpistemicState::from_source(&file.theory)
        .map_err(|e| format!("malformed session file: section `theory`: {e}"))?;
    for (i, entry) in file.history.iter().enumerate() {
        let section = format!("history[{i}]");
        let formula = parse_formula(&entry.formula)
            .map_err(|e| format!("malformed session file: section `{section}`: {e}"))?;
        state = match entry.op {
            OpKind::Revise => revise(&state, &formula),
            OpKind::Contract => contract(&state, &formula),
        }
        .map_err(|e| format!("malformed session file: section `{section}`: {e}"))?;
        let got = &state.history.last().unwrap().name;
        if got != &entry.name {
            return Err(format!(
                "malformed session file: section `{section}`: replay assigned name `{got}`, file records `{}`",
                entry.name
            ));
        }
    }
    Ok(state)
}

/// Run a script (one command per line) against a session; stops after `quit`.
pub fn run_script(session: &mut Session, script: &str) -> Vec<Output> {
    let mut outputs = Vec::new();
    for line in script.lines() {
        match Command::parse(line) {
            Ok(None) => {}
            Ok(Some(cmd)) => {
                let out = session.execute(&cmd);
                let quit = out.quit;
                outputs.push(out);
                if quit {
                    break;
                }
            }
            Err(msg) => outputs.push(Output::err("parse", ErrorCode::Parse, msg)),
        }
    }
    outputs
}

const HELP: &str = r#"
commands:
  load <path>              load a theory file or a saved session
  revise <formula>         add the formula as a premise under a fresh name
  contract <formula>       stop believing the formula (adds a constraint)
  query <formula>          is the formula an accepted conclusion?
  extensions all           every extension base of the theory
  extensions compatible    the accepted bases at the fixed point
  preferred                the self-compatible extensions
  accepted-bases           alias for `extensions compatible`
  trace                    accepted-base counts per fixpoint step
  postulates <A> ; <B>     evaluate the eight revision postulates
  show <name>              print one named formula
  save <path>              save the session (theory + history)
  set <option> <n>         max-decisions, max-models, max-linearizations
  help                     this text
  quit                     leave
"#;

/// Used by the CLI to seed a session from `--theory`.
pub fn state_from_theory_file(path: &str) -> Result<EpistemicState, String> {
    load_state(path)
}

/// The ground theory currently loaded (handy for tests).
pub fn theory_of(session: &Session) -> &GroundTheory {
    &session.state.theory
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_round_trip_through_text() {
        let cmds = [
            Command::Load("corpus/tweety.pdt".into()),
            Command::Revise("d1 < d2".into()),
            Command::Contract("~flies(tweety)".into()),
            Command::Query("p | ~p".into()),
            Command::Extensions(Scope::All),
            Command::Extensions(Scope::Compatible),
            Command::Preferred,
            Command::AcceptedBases,
            Command::Trace,
            Command::Postulates("d1 < d2".into(), "d1 < d3".into()),
            Command::Save("/tmp/x.json".into()),
            Command::Show("d1".into()),
            Command::Set("max-models".into(), "5".into()),
            Command::Help,
            Command::Quit,
        ];
        for cmd in cmds {
            let line = cmd.to_line();
            let parsed = Command::parse(&line).unwrap().unwrap();
            assert_eq!(parsed, cmd, "line: {line}");
        }
        assert_eq!(Command::parse("  # comment").unwrap(), None);
        assert_eq!(Command::parse("").unwrap(), None);
        assert!(Command::parse("frobnicate").is_err());
    }

    #[test]
    fn failing_commands_leave_the_state_unchanged() {
        let mut s = Session::new();
        let script = "revise p\nquery p";
        let outs = run_script(&mut s, script);
        assert!(outs.iter().all(|o| o.error.is_none()));
        let digest = s.state_digest();
        // bad formula, unknown command, unknown name
        for line in ["revise p <", "query d7 < d9", "show d9"] {
            if let Ok(Some(cmd)) = Command::parse(line) {
                let out = s.execute(&cmd);
                assert!(out.error.is_some(), "line {line} should fail");
            }
            assert_eq!(s.state_digest(), digest, "state changed by `{line}`");
        }
    }

    #[test]
    fn machine_lines_are_single_json_documents() {
        let mut s = Session::new();
        let outs = run_script(&mut s, "revise p\nquery p\nquery ~p");
        let lines: Vec<String> = outs.iter().map(|o| o.machine_line()).collect();
        assert!(lines[0].starts_with("{\"command\":\"revise\""));
        let v: Value = serde_json::from_str(&lines[1]).unwrap();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["data"]["accepted"], true);
        let v: Value = serde_json::from_str(&lines[2]).unwrap();
        assert_eq!(v["data"]["accepted"], false);
    }

    #[test]
    fn queries_are_cached_until_the_state_changes() {
        let mut s = Session::new();
        run_script(&mut s, "revise p");
        assert!(s.fixpoint_cache.is_none());
        run_script(&mut s, "query p");
        assert!(s.fixpoint_cache.is_some());
        run_script(&mut s, "revise q");
        assert!(s.fixpoint_cache.is_none());
    }

    #[test]
    fn session_files_round_trip() {
        let dir = std::env::temp_dir().join("prefdl-session-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.json");
        let path = path.to_str().unwrap();

        let mut s = Session::new();
        let outs = run_script(
            &mut s,
            &format!("revise p\nrevise ~p\nrevise d1 < d2\nsave {path}"),
        );
        assert!(outs.iter().all(|o| o.error.is_none()));
        let restored = load_session(path).unwrap();
        assert_eq!(restored, s.state);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn malformed_session_files_name_the_section() {
        let dir = std::env::temp_dir().join("prefdl-session-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(
            &path,
            r#"{"version":1,"theory":"premise d1: p.","history":[{"op":"revise","formula":"q","name":"d7","timestamp":0}]}"#,
        )
        .unwrap();
        let err = load_session(path.to_str().unwrap()).unwrap_err();
        assert!(err.contains("history[0]"), "{err}");
        std::fs::remove_file(path).ok();
    }
}
