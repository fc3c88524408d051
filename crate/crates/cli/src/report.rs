// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Run reports and their byte-stable JSON encoding.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::formats::MatrixJson;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    /// sha256 of each input file, keyed by role.
    pub inputs: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, bool>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, MatrixJson>,
}

impl RunReport {
    pub fn new(command: &str, tolerance: f64, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerance,
            seed,
            details: BTreeMap::new(),
            witnesses: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, role: &str, bytes: &[u8]) {
        self.inputs.insert(role.to_string(), digest(bytes));
    }

    pub fn verdict(&mut self, name: &str, v: bool) -> &mut Self {
        self.verdicts.insert(name.to_string(), v);
        self
    }

    pub fn residual(&mut self, name: &str, r: f64) -> &mut Self {
        self.residuals.insert(name.to_string(), r);
        self
    }

    pub fn detail(&mut self, name: &str, v: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(v).expect("report details serialize");
        self.details.insert(name.to_string(), v);
        self
    }

    pub fn witness(&mut self, name: &str, m: impl Into<MatrixJson>) -> &mut Self {
        self.witnesses.insert(name.to_string(), m.into());
        self
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty printing with every float written as `{:.16e}` (17 significant
/// digits), so that equal values always produce equal bytes.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}
