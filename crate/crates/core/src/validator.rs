//! Compiled schemas and whole-table validation.

use crate::content::{compile_content, failing_rows, region_matches, ContentAutomaton, PadMode};
use crate::error::{ParseError, SchemaError};
use crate::eval::{CoordProgram, EvalStats};
use crate::guard::{analyze, FragmentReport, GuardOptions};
use crate::region::Region;
use crate::report::{GuardKind, Location, UniqueViolation, ValidationReport, Violation, SAMPLE_LIMIT};
use crate::schema::ast::{CoordExpr, SchemaDoc, Semantics};
use crate::schema::{desugar, parse_schema};
use crate::table::{parse_document, Delimiters, RawTable};
use crate::tokens::{tokenize, TokenDefs, TokenId, TokenizedTable};

#[derive(Debug, Clone)]
pub struct CompiledRule {
    /// Source form, as written in the schema.
    pub text: String,
    /// Selector with sugar and token types expanded.
    pub selector: CoordExpr,
    pub program: CoordProgram,
    pub content: ContentAutomaton,
    pub semantics: Semantics,
}

/// A parsed schema with token definitions and rules compiled.
#[derive(Debug, Clone)]
pub struct Schema {
    doc: SchemaDoc,
    core: SchemaDoc,
    defs: TokenDefs,
    rules: Vec<CompiledRule>,
    unique: Vec<(String, TokenId)>,
    unique_per_row: Vec<(String, TokenId)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    pub pad: PadMode,
}

impl Schema {
    pub fn parse(src: &str) -> Result<Self, SchemaError> {
        Self::from_doc(parse_schema(src)?)
    }

    pub fn from_doc(doc: SchemaDoc) -> Result<Self, SchemaError> {
        let core = desugar::desugar(&doc)?;
        let defs = core.token_defs()?;
        let vocab = defs.vocabulary().clone();
        let rules = doc
            .rules
            .iter()
            .zip(&core.rules)
            .map(|(orig, r)| {
                let selector = desugar::core(&r.selector);
                Ok(CompiledRule {
                    text: orig.to_string(),
                    program: CoordProgram::compile(&selector, &vocab),
                    selector,
                    content: compile_content(&r.content, &vocab)?,
                    semantics: r.semantics,
                })
            })
            .collect::<Result<Vec<_>, SchemaError>>()?;
        let lookup = |names: &[String]| {
            names
                .iter()
                .map(|n| {
                    defs.id(n)
                        .map(|id| (n.clone(), id))
                        .ok_or_else(|| SchemaError::UndefinedToken(n.clone()))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let unique = lookup(&core.uniques)?;
        let unique_per_row = lookup(&core.uniques_per_row)?;
        Ok(Schema {
            doc,
            core,
            defs,
            rules,
            unique,
            unique_per_row,
        })
    }

    /// The schema as parsed, sugar included.
    pub fn doc(&self) -> &SchemaDoc {
        &self.doc
    }

    /// The schema with sugar and token types expanded.
    pub fn core(&self) -> &SchemaDoc {
        &self.core
    }

    pub fn token_defs(&self) -> &TokenDefs {
        &self.defs
    }

    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn delimiters(&self) -> Delimiters {
        self.doc.delims
    }

    pub fn unique_tokens(&self) -> &[(String, TokenId)] {
        &self.unique
    }

    pub fn unique_per_row_tokens(&self) -> &[(String, TokenId)] {
        &self.unique_per_row
    }

    pub fn tokenize(&self, raw: &RawTable) -> TokenizedTable {
        tokenize(raw, &self.defs)
    }

    /// Parses document bytes with the schema's delimiters and tokenizes them.
    pub fn read_table(&self, bytes: &[u8]) -> Result<TokenizedTable, ParseError> {
        Ok(self.tokenize(&parse_document(bytes, self.delimiters())?))
    }

    pub fn analyze(&self, opts: &GuardOptions) -> FragmentReport {
        analyze(&self.doc, opts)
    }

    pub fn validate(&self, t: &TokenizedTable, opts: ValidateOptions) -> ValidationReport {
        self.validate_counted(t, opts, &mut EvalStats::default())
    }

    /// Like `validate`, also counting product-graph visits of region evaluation.
    pub fn validate_counted(&self, t: &TokenizedTable, opts: ValidateOptions, stats: &mut EvalStats) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, rule) in self.rules.iter().enumerate() {
            let z = rule.program.eval_counted(t, stats);
            if let Some(v) = check_rule(i + 1, rule, t, &z, opts.pad) {
                report.violations.push(v);
            }
        }
        report.unique_violations = self.unique_violations(t);
        report
    }

    fn unique_violations(&self, t: &TokenizedTable) -> Vec<UniqueViolation> {
        let mut out = Vec::new();
        let at = |id: TokenId| {
            (0..t.len())
                .filter(move |&i| t.cells()[i].contains(id))
                .map(|i| t.coordinate(i))
        };
        for (name, id) in &self.unique {
            let coords: Vec<_> = at(*id).collect();
            if coords.len() > 1 {
                out.push(UniqueViolation {
                    token: name.clone(),
                    kind: GuardKind::Unique,
                    row: None,
                    coords,
                });
            }
        }
        for (name, id) in &self.unique_per_row {
            let coords: Vec<_> = at(*id).collect();
            for k in 1..=t.rows() {
                let in_row: Vec<_> = coords.iter().copied().filter(|c| c.row == k).collect();
                if in_row.len() > 1 {
                    out.push(UniqueViolation {
                        token: name.clone(),
                        kind: GuardKind::UniquePerRow,
                        row: Some(k),
                        coords: in_row,
                    });
                }
            }
        }
        out
    }
}

pub(crate) fn rule_message(rule: &CompiledRule, failing: usize) -> String {
    let mut m = format!("content does not match `{}`", rule.text);
    if failing > 1 {
        m.push_str(&format!(" ({failing} failing rows)"));
    }
    m
}

fn check_rule(index: usize, rule: &CompiledRule, t: &TokenizedTable, z: &Region, pad: PadMode) -> Option<Violation> {
    match rule.semantics {
        Semantics::RowBased => {
            let bad = failing_rows(t, z, &rule.content, pad);
            let &first = bad.first()?;
            Some(Violation {
                rule: index,
                location: Location::Row(first),
                failing_rows: bad.len(),
                sample: z.iter().filter(|c| c.row == first).take(SAMPLE_LIMIT).collect(),
                message: rule_message(rule, bad.len()),
            })
        }
        Semantics::RegionBased => (!region_matches(t, z, &rule.content, pad)).then(|| Violation {
            rule: index,
            location: Location::Region,
            failing_rows: 1,
            sample: z.iter().take(SAMPLE_LIMIT).collect(),
            message: rule_message(rule, 1),
        }),
    }
}

/// Validates `t` against `schema` with default options.
pub fn validate(t: &TokenizedTable, schema: &Schema) -> ValidationReport {
    schema.validate(t, ValidateOptions::default())
}
