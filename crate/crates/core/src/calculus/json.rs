//! Derivation JSON: `{"rule", "conclusion": {"ante", "succ"}, "params",
//! "cutFormula", "note", "premises"}` with labels as integer lists and
//! formulas in the concrete syntax.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CalcError, Derivation, Label, LabelledFormula, Params, Rule, Sequent};
use crate::syntax::{parse_with, print, var, ParseError, ParseOptions, Signature};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("formula `{text}`: {source}")]
    Formula { text: String, source: ParseError },
    #[error("label {0:?}: {1}")]
    Label(Vec<u32>, CalcError),
    #[error("unknown rule tag `{0}`")]
    UnknownRule(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfJson {
    pub label: Vec<u32>,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SequentJson {
    #[serde(default)]
    pub ante: Vec<LfJson>,
    #[serde(default)]
    pub succ: Vec<LfJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ParamsJson {
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<LfJson>,
}

impl ParamsJson {
    fn is_empty(&self) -> bool {
        self.y.is_none() && self.var.is_none() && self.principal.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: String,
    pub conclusion: SequentJson,
    #[serde(default, skip_serializing_if = "ParamsJson::is_empty")]
    pub params: ParamsJson,
    #[serde(rename = "cutFormula", default, skip_serializing_if = "Option::is_none")]
    pub cut_formula: Option<LfJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default)]
    pub premises: Vec<DerivationJson>,
}

pub fn lf_to_json(lf: &LabelledFormula) -> LfJson {
    LfJson { label: lf.label.iter().collect(), formula: print(&lf.formula) }
}

pub fn sequent_to_json(s: &Sequent) -> SequentJson {
    SequentJson {
        ante: s.ante.iter().map(lf_to_json).collect(),
        succ: s.succ.iter().map(lf_to_json).collect(),
    }
}

pub fn to_dto(d: &Derivation) -> DerivationJson {
    DerivationJson {
        rule: d.rule.tag().to_string(),
        conclusion: sequent_to_json(&d.conclusion),
        params: ParamsJson {
            y: d.params.y.map(|y| y.iter().collect()),
            var: d.params.var.as_ref().map(|v| v.to_string()),
            principal: d.params.principal.as_ref().map(lf_to_json),
        },
        cut_formula: d.params.cut.as_ref().map(lf_to_json),
        note: d.note.clone(),
        premises: d.premises.iter().map(to_dto).collect(),
    }
}

pub fn to_json_value(d: &Derivation) -> serde_json::Value {
    serde_json::to_value(to_dto(d)).expect("derivation DTOs always serialize")
}

pub fn to_json_string(d: &Derivation) -> String {
    serde_json::to_string_pretty(&to_dto(d)).expect("derivation DTOs always serialize")
}

/// Reads formulas, labels and rule tags back into a derivation. Reserved
/// `_vK` names are accepted and arities are shared across the whole file.
pub struct Reader {
    sig: Signature,
}

impl Default for Reader {
    fn default() -> Self {
        Reader { sig: Signature::new() }
    }
}

impl Reader {
    pub fn label(&self, xs: &[u32]) -> Result<Label, JsonError> {
        Label::from_slice(xs).map_err(|e| JsonError::Label(xs.to_vec(), e))
    }

    pub fn lf(&mut self, j: &LfJson) -> Result<LabelledFormula, JsonError> {
        let f = parse_with(&j.formula, &mut self.sig, ParseOptions { allow_reserved: true })
            .map_err(|source| JsonError::Formula { text: j.formula.clone(), source })?;
        Ok(LabelledFormula::new(self.label(&j.label)?, f))
    }

    pub fn sequent(&mut self, j: &SequentJson) -> Result<Sequent, JsonError> {
        let ante = j.ante.iter().map(|x| self.lf(x)).collect::<Result<_, _>>()?;
        let succ = j.succ.iter().map(|x| self.lf(x)).collect::<Result<_, _>>()?;
        Ok(Sequent::new(ante, succ))
    }

    pub fn derivation(&mut self, j: &DerivationJson) -> Result<Derivation, JsonError> {
        let rule = Rule::from_tag(&j.rule).ok_or_else(|| JsonError::UnknownRule(j.rule.clone()))?;
        let conclusion = self.sequent(&j.conclusion)?;
        let params = Params {
            principal: j.params.principal.as_ref().map(|p| self.lf(p)).transpose()?,
            y: j.params.y.as_ref().map(|y| self.label(y)).transpose()?,
            var: j.params.var.as_deref().map(var),
            cut: j.cut_formula.as_ref().map(|c| self.lf(c)).transpose()?,
        };
        let premises = j.premises.iter().map(|p| self.derivation(p)).collect::<Result<Vec<_>, _>>()?;
        let mut d = Derivation { conclusion, rule, params, premises, height: 0, note: j.note.clone() };
        d.recompute_height();
        Ok(d)
    }
}

pub fn from_json_str(text: &str) -> Result<Derivation, JsonError> {
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let dto = DerivationJson::deserialize(&mut de)?;
    de.end()?;
    Reader::default().derivation(&dto)
}

pub fn from_json_value(v: &serde_json::Value) -> Result<Derivation, JsonError> {
    let dto = DerivationJson::deserialize(v)?;
    Reader::default().derivation(&dto)
}
