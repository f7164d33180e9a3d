//! The `.scm.txt` model language: components, relations, Galois
//! connections, concretizers and refinements.

mod build;
mod lexer;
mod parser;
mod write;

use std::fmt;

use streamcheck_core::abstraction::{ConcretizerSpec, GaloisSpec, RelationSpec};
use streamcheck_core::{ComponentSpec, DataType};

pub use parser::{parse_expr, RESERVED};
pub use write::{serialize_model, write_type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub ty: DataType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationDecl {
    pub abstract_component: String,
    pub concrete_component: String,
    pub spec: RelationSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaloisDecl {
    pub abstract_component: String,
    pub concrete_component: String,
    pub spec: GaloisSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcretizerDecl {
    pub abstract_component: String,
    pub concrete_component: String,
    pub spec: ConcretizerSpec,
}

/// Names an abstract and a concrete component and whatever relates them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Refinement {
    pub name: String,
    pub abstract_component: String,
    pub concrete_component: String,
    pub ri: Option<String>,
    pub ro: Option<String>,
    pub galois: Option<String>,
    pub concretizer: Option<String>,
}

/// A parsed and fully resolved model file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelDocument {
    pub types: Vec<TypeDecl>,
    /// In declaration order; composites hold copies of their parts.
    pub components: Vec<ComponentSpec>,
    pub relations: Vec<RelationDecl>,
    pub galois: Vec<GaloisDecl>,
    pub concretizers: Vec<ConcretizerDecl>,
    pub refinements: Vec<Refinement>,
}

impl ModelDocument {
    pub fn component(&self, name: &str) -> Option<&ComponentSpec> {
        self.components.iter().find(|c| c.name() == name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationDecl> {
        self.relations.iter().find(|r| r.spec.name == name)
    }

    pub fn galois(&self, name: &str) -> Option<&GaloisDecl> {
        self.galois.iter().find(|g| g.spec.name == name)
    }

    pub fn concretizer(&self, name: &str) -> Option<&ConcretizerDecl> {
        self.concretizers.iter().find(|c| c.spec.name == name)
    }

    pub fn refinement(&self, name: &str) -> Option<&Refinement> {
        self.refinements.iter().find(|r| r.name == name)
    }

    pub fn is_empty(&self) -> bool {
        *self == ModelDocument::default()
    }
}

/// Parses and resolves a model. Diagnostics are sorted by position.
pub fn parse_model(text: &str) -> Result<ModelDocument, Vec<Diagnostic>> {
    let items = parser::parse_items(text).map_err(|d| vec![d])?;
    build::build(items)
}

/// Like [`parse_model`], for input that may not be UTF-8.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<ModelDocument, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_model(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = 1 + good.iter().filter(|b| **b == b'\n').count();
            let col = 1 + std::str::from_utf8(good)
                .map(|s| s.rsplit('\n').next().unwrap_or("").chars().count())
                .unwrap_or(0);
            Err(vec![Diagnostic::new(Pos { line, col }, "input is not valid UTF-8")])
        }
    }
}
