//! On-disk JSON documents for instances, assignments, and payments.
//!
//! Exact values travel as strings: rationals are always emitted as "p/q"
//! in lowest terms and infinity as "inf". Parsers additionally accept bare
//! integers as shorthand. Serialization is canonical, so parse and
//! serialize are mutually inverse on well-formed documents and byte-equal
//! reruns come for free.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{parse_ratio, ratio_string, Cost};
use crate::envy::Payments;
use crate::error::Error;
use crate::instance::{FractionalAssignment, Instance, IntegralAssignment};
use crate::Result;

/// One matrix cell on disk: an exact string or an integer shorthand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    fn to_cost(&self) -> Result<Cost> {
        match self {
            Entry::Int(k) if *k >= 0 => Ok(Cost::from_int(*k as u64)),
            Entry::Int(k) => Err(Error::invalid(format!("negative cost {k}"))),
            Entry::Text(s) => s.parse(),
        }
    }

    fn to_ratio(&self) -> Result<BigRational> {
        match self {
            Entry::Int(k) => Ok(crate::cost::int_ratio(*k)),
            Entry::Text(s) => parse_ratio(s),
        }
    }

    fn from_cost(c: &Cost) -> Entry {
        Entry::Text(c.to_string())
    }

    fn from_ratio(r: &BigRational) -> Entry {
        Entry::Text(ratio_string(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub machines: usize,
    pub jobs: usize,
    pub costs: Vec<Vec<Entry>>,
}

impl InstanceDocument {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceDocument {
            machines: instance.machines(),
            jobs: instance.jobs(),
            costs: instance
                .rows()
                .iter()
                .map(|row| row.iter().map(Entry::from_cost).collect())
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.costs.len() != self.machines {
            return Err(Error::dims(format!(
                "document says {} machines but has {} cost rows",
                self.machines,
                self.costs.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.machines);
        for row in &self.costs {
            if row.len() != self.jobs {
                return Err(Error::dims(format!(
                    "document says {} jobs but a row has {} entries",
                    self.jobs,
                    row.len()
                )));
            }
            rows.push(row.iter().map(Entry::to_cost).collect::<Result<Vec<_>>>()?);
        }
        Instance::new(rows)
    }
}

/// Integral schedules store the machine index per job; fractional ones the
/// full rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AssignmentDocument {
    Integral { machines: usize, machine_of: Vec<usize> },
    Fractional { fractions: Vec<Vec<Entry>> },
}

impl AssignmentDocument {
    pub fn from_integral(machines: usize, a: &IntegralAssignment) -> Self {
        AssignmentDocument::Integral { machines, machine_of: a.machine_of.clone() }
    }

    pub fn from_fractional(a: &FractionalAssignment) -> Self {
        AssignmentDocument::Fractional {
            fractions: a
                .fractions
                .iter()
                .map(|row| row.iter().map(Entry::from_ratio).collect())
                .collect(),
        }
    }

    pub fn to_integral(&self) -> Result<IntegralAssignment> {
        match self {
            AssignmentDocument::Integral { machine_of, .. } => {
                Ok(IntegralAssignment::new(machine_of.clone()))
            }
            AssignmentDocument::Fractional { .. } => {
                Err(Error::invalid("expected an integral assignment document"))
            }
        }
    }

    pub fn to_fractional(&self) -> Result<FractionalAssignment> {
        match self {
            AssignmentDocument::Fractional { fractions } => {
                let rows = fractions
                    .iter()
                    .map(|row| row.iter().map(Entry::to_ratio).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(FractionalAssignment::new(rows))
            }
            AssignmentDocument::Integral { .. } => {
                Err(Error::invalid("expected a fractional assignment document"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaymentsDocument {
    pub payments: Vec<Entry>,
}

impl PaymentsDocument {
    pub fn from_payments(p: &Payments) -> Self {
        PaymentsDocument { payments: p.p.iter().map(Entry::from_ratio).collect() }
    }

    pub fn to_payments(&self) -> Result<Payments> {
        Ok(Payments {
            p: self.payments.iter().map(Entry::to_ratio).collect::<Result<Vec<_>>>()?,
        })
    }
}

/// Canonical text form: pretty JSON plus a trailing newline.
pub fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed document: {e}")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    parse::<InstanceDocument>(text)?.to_instance()
}

pub fn render_instance(instance: &Instance) -> String {
    render(&InstanceDocument::from_instance(instance))
}

/// Hex SHA-256 of the canonical instance document, identifying the instance
/// across reports.
pub fn instance_digest(instance: &Instance) -> String {
    let mut hasher = Sha256::new();
    hasher.update(render_instance(instance).as_bytes());
    hex::encode(hasher.finalize())
}
