use serde::Serialize;
use serde_json::{json, Value};

use g2loop::sampling::RNG_NAME;
use g2loop::Error;

use crate::{Backend, Cli};

#[derive(Serialize)]
pub struct Header {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    rng: &'static str,
    seed: u64,
    backend: Backend,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    rank_tol: f64,
    grid: usize,
}

impl Header {
    pub fn new(command: &'static str, cli: &Cli) -> Self {
        Header {
            tool: "g2loop",
            version: env!("CARGO_PKG_VERSION"),
            command,
            rng: RNG_NAME,
            seed: cli.seed,
            backend: cli.backend,
            tol: cli.tol,
            rank_tol: cli.rank_tol,
            grid: cli.grid,
        }
    }
}

/// Primary artifact plus the certificates that decide `ok`.
pub struct Outcome {
    pub ok: bool,
    pub result: Value,
    pub checks: Value,
}

#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
    pub witness: Option<Value>,
}

impl Failure {
    pub const CERTIFICATE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const RANK: u8 = 3;

    pub fn parse(message: impl Into<String>) -> Self {
        Failure { status: Self::PARSE, message: message.into(), witness: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (status, witness) = match &e {
            Error::NoConvergence(best) => (Failure::CERTIFICATE, Some(json!({ "best_residual": best }))),
            Error::NotConstant(dev) => (Failure::CERTIFICATE, Some(json!({ "deviation": dev }))),
            Error::RankDefect { expected, got } | Error::WrongDimension { expected, got } => {
                (Failure::RANK, Some(json!({ "expected": expected, "got": got })))
            }
            Error::StageMembership { stage, .. } => (Failure::RANK, Some(json!({ "stage": stage }))),
            Error::NotInStratum { k, l, .. } => (Failure::RANK, Some(json!({ "xi": { "k": k, "l": l } }))),
            Error::NotInvertible => (Failure::RANK, None),
            _ => (Failure::PARSE, None),
        };
        Failure { status, message: e.to_string(), witness }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::parse(format!("invalid input: {e}"))
    }
}

pub fn render(header: Header, outcome: Result<Outcome, Failure>) -> (String, u8) {
    let (body, status) = match outcome {
        Ok(o) => {
            let status = if o.ok { 0 } else { Failure::CERTIFICATE };
            (json!({ "header": header, "ok": o.ok, "result": o.result, "checks": o.checks }), status)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            let mut err = json!({ "status": f.status, "message": f.message });
            if let Some(w) = f.witness {
                err["witness"] = w;
            }
            (json!({ "header": header, "ok": false, "error": err }), f.status)
        }
    };
    let mut text = serde_json::to_string_pretty(&body).expect("report serializes");
    text.push('\n');
    (text, status)
}
