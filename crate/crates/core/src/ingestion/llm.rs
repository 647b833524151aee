//! Transcript extraction through a chat-completion endpoint.

use crate::grammar::{parse_constraint_document_with, GrammarError};
use crate::model::{ConstraintSet, GameConfig, GameKind, ManualWeights};

use super::IngestError;

const AVALON_PROMPT: &str = include_str!("../../assets/avalon_prompt.txt");
const MAFIA_PROMPT: &str = include_str!("../../assets/mafia_prompt.txt");

/// Retries after the first malformed reply.
pub const DEFAULT_RETRIES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    Avalon,
    Mafia,
}

impl Template {
    pub fn for_kind(kind: GameKind) -> Option<Self> {
        match kind {
            GameKind::Avalon => Some(Template::Avalon),
            GameKind::Mafia => Some(Template::Mafia),
            GameKind::Custom => None,
        }
    }
}

impl std::str::FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "avalon" => Ok(Template::Avalon),
            "mafia" => Ok(Template::Mafia),
            _ => Err(format!("unknown template `{s}`")),
        }
    }
}

/// System prompt for `template`, with the Avalon name lists filled from `config`.
pub fn render_prompt(template: Template, config: &GameConfig) -> String {
    match template {
        Template::Avalon => {
            let roles: Vec<&str> = config.roles().iter().map(|r| r.name.as_str()).collect();
            AVALON_PROMPT.replace("{players}", &config.players().join(",")).replace("{roles}", &roles.join(", "))
        }
        Template::Mafia => MAFIA_PROMPT.to_string(),
    }
}

/// The one call an extractor needs from an endpoint: system prompt plus
/// transcript in, raw reply text out. Implementations must decode at
/// temperature 0.
pub trait CompletionClient: Send + Sync {
    fn complete(&self, prompt: &str, transcript: &str) -> Result<String, String>;
}

impl<C: CompletionClient + ?Sized> CompletionClient for &C {
    fn complete(&self, prompt: &str, transcript: &str) -> Result<String, String> {
        (**self).complete(prompt, transcript)
    }
}

/// Drops a surrounding Markdown code fence, if any.
fn strip_fence(reply: &str) -> &str {
    let t = reply.trim();
    let Some(rest) = t.strip_prefix("```") else { return t };
    let rest = rest.split_once('\n').map_or("", |(_, body)| body);
    rest.trim_end().strip_suffix("```").unwrap_or(rest).trim()
}

pub struct Extractor<C> {
    client: C,
    retries: usize,
    weights: ManualWeights,
}

impl<C: CompletionClient> Extractor<C> {
    pub fn new(client: C) -> Self {
        Extractor { client, retries: DEFAULT_RETRIES, weights: ManualWeights::default() }
    }

    pub fn with_retries(mut self, retries: usize) -> Self {
        self.retries = retries;
        self
    }

    pub fn with_weights(mut self, weights: ManualWeights) -> Self {
        self.weights = weights;
        self
    }

    /// Sends the prompt and transcript, parsing each reply as a constraint
    /// document. An invalid reply is retried up to `retries` more times;
    /// endpoint failures are not retried.
    pub fn extract(
        &self,
        transcript: &str,
        template: Template,
        config: &GameConfig,
    ) -> Result<ConstraintSet, IngestError> {
        let prompt = render_prompt(template, config);
        let mut last: Option<GrammarError> = None;
        for _ in 0..=self.retries {
            let reply = self.client.complete(&prompt, transcript).map_err(IngestError::Endpoint)?;
            match parse_constraint_document_with(strip_fence(&reply), config, &self.weights) {
                Ok(set) => return Ok(set),
                Err(e) => last = Some(e),
            }
        }
        Err(IngestError::ExtractionInvalid { attempts: self.retries + 1, last: last.expect("at least one attempt") })
    }
}
