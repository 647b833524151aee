use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use rolecsp::ingestion::{CompletionClient, Extractor, Template, DEFAULT_RETRIES};
use rolecsp::serialize_constraint_set;
use serde_json::{json, Value};

use crate::{inputs, CliError};

pub const API_KEY_VAR: &str = "ROLECSP_API_KEY";

#[derive(clap::Args)]
pub struct Args {
    /// Transcript text file.
    #[arg(long)]
    transcript: PathBuf,
    /// Game config JSON naming the players and roles.
    #[arg(long)]
    game: PathBuf,
    /// `avalon` or `mafia`; defaults to the game's kind.
    #[arg(long)]
    template: Option<String>,
    /// Chat-completions URL.
    #[arg(long, env = "ROLECSP_ENDPOINT", default_value = "https://api.openai.com/v1/chat/completions")]
    endpoint: String,
    #[arg(long, env = "ROLECSP_MODEL", default_value = "gpt-4o")]
    model: String,
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    retries: usize,
    #[arg(long, default_value_t = 120)]
    timeout_secs: u64,
    /// Constraint document output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// OpenAI-style chat-completions client decoding at temperature 0.
pub struct ChatClient {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    api_key: Option<String>,
}

impl ChatClient {
    pub fn new(endpoint: String, model: String, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        ChatClient { agent, endpoint, model, api_key }
    }
}

impl CompletionClient for ChatClient {
    fn complete(&self, prompt: &str, transcript: &str) -> Result<String, String> {
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": prompt},
                {"role": "user", "content": transcript},
            ],
        });
        let mut req = self.agent.post(&self.endpoint).header("content-type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send(body.to_string()).map_err(|e| format!("{}: {e}", self.endpoint))?;
        let text = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        let reply: Value = serde_json::from_str(&text).map_err(|e| format!("reply is not JSON: {e}"))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(String::from)
            .ok_or_else(|| "reply has no choices[0].message.content".into())
    }
}

pub fn run(a: Args) -> Result<(), CliError> {
    let config = inputs::game_config(&a.game)?;
    let template = match &a.template {
        Some(t) => t.parse().map_err(CliError::input)?,
        None => Template::for_kind(config.kind())
            .ok_or_else(|| CliError::input("custom games need an explicit --template"))?,
    };
    let transcript = inputs::read(&a.transcript)?;
    let api_key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
    let client = ChatClient::new(a.endpoint, a.model, api_key, Duration::from_secs(a.timeout_secs));
    let set = Extractor::new(client).with_retries(a.retries).extract(&transcript, template, &config)?;
    let doc = serialize_constraint_set(&set);
    match &a.out {
        Some(p) => fs::write(p, &doc).map_err(|e| CliError::io(p, e))?,
        None => println!("{}", String::from_utf8_lossy(&doc)),
    }
    Ok(())
}
