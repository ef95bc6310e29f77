//! Binary container for a built index, plus a JSON dump for inspection.
//!
//! Layout: `FPIX`, a `u32` version, then tagged sections `tag[4] len:u64
//! payload`. All integers are little-endian.

use std::io::{Read, Write};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::polyhash::HashParams;
use crate::seqcore::{Alphabet, Rank, Sequence};

use super::{BacktrackFunction, BuilderKind, FingerprintIndex, FingerprintTrie, ReportIndex};

pub const MAGIC: &[u8; 4] = b"FPIX";
pub const VERSION: u32 = 1;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u32s(&mut self, xs: impl ExactSizeIterator<Item = u32>) {
        self.u64(xs.len() as u64);
        xs.for_each(|x| self.u32(x));
    }
    fn section(&mut self, tag: &[u8; 4], body: Writer) {
        self.buf.extend_from_slice(tag);
        self.u64(body.buf.len() as u64);
        self.buf.extend_from_slice(&body.buf);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
}

fn truncated() -> Error {
    Error::Format("unexpected end of data".into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(truncated());
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self, item: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.checked_mul(item)
            .is_none_or(|bytes| bytes > self.buf.len())
        {
            return Err(truncated());
        }
        Ok(n)
    }
    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.len(4)?;
        (0..n).map(|_| self.u32()).collect()
    }
    fn section(&mut self, tag: &[u8; 4]) -> Result<Reader<'a>> {
        let found = self.take(4)?;
        if found != tag {
            return Err(Error::Format(format!(
                "expected section {}, found {}",
                String::from_utf8_lossy(tag),
                String::from_utf8_lossy(found)
            )));
        }
        let n = self.len(1)?;
        Ok(Reader { buf: self.take(n)? })
    }
    fn finish(&self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Format("trailing bytes".into()))
        }
    }
}

impl FingerprintIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Writer::default();
        out.buf.extend_from_slice(MAGIC);
        out.u32(VERSION);

        let mut meta = Writer::default();
        meta.u8(self.builder.code());
        meta.u64(self.seed);
        meta.u64(self.backtrack_attempts as u64);
        out.section(b"META", meta);

        let mut alph = Writer::default();
        let symbols = self.alphabet.symbols();
        alph.u64(symbols.len() as u64);
        alph.buf.extend_from_slice(symbols);
        out.section(b"ALPH", alph);

        let mut seqn = Writer::default();
        seqn.u32s(self.seq.ranks().iter().copied());
        for &(a, b) in self.seq.runmap() {
            seqn.u64(a as u64);
            seqn.u64(b as u64);
        }
        out.section(b"SEQN", seqn);

        let mut trie = Writer::default();
        trie.u32s(self.trie.parents().iter().copied());
        trie.u32s(self.trie.labels().iter().copied());
        out.section(b"TRIE", trie);

        let params = self.backtrack.params();
        let mut hash = Writer::default();
        hash.u64(params.modulus());
        hash.u64(params.point());
        hash.u32(params.depth() as u32);
        out.section(b"HASH", hash);

        let mut bktr = Writer::default();
        let pairs = self.backtrack.pairs();
        bktr.u64(pairs.len() as u64);
        for (h, r) in pairs {
            bktr.u64(h);
            bktr.u32(r);
        }
        out.section(b"BKTR", bktr);

        let mut rept = Writer::default();
        rept.u32s(self.report.supports().iter().copied());
        rept.u64(self.report.ranges().len() as u64);
        for &(a, b) in self.report.ranges() {
            rept.u32(a);
            rept.u32(b);
        }
        rept.u32s(self.report.offsets().iter().copied());
        out.section(b"REPT", rept);
        out.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes };
        if r.take(4)
            .map_err(|_| Error::Format("not an index file".into()))?
            != MAGIC
        {
            return Err(Error::Format("not an index file".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }

        let mut meta = r.section(b"META")?;
        let builder = BuilderKind::from_code(meta.u8()?)?;
        let seed = meta.u64()?;
        let backtrack_attempts = meta.u64()? as usize;
        meta.finish()?;

        let mut alph = r.section(b"ALPH")?;
        let count = alph.len(1)?;
        let alphabet = Alphabet::from_symbols(alph.take(count)?.to_vec())?;
        alph.finish()?;
        let sigma = alphabet.size();

        let mut seqn = r.section(b"SEQN")?;
        let ranks = seqn.u32s()?;
        let mut runmap = Vec::with_capacity(ranks.len());
        for _ in 0..ranks.len() {
            runmap.push((seqn.u64()? as usize, seqn.u64()? as usize));
        }
        seqn.finish()?;
        let seq = Sequence::from_parts(ranks, sigma, runmap)?;

        let mut tr = r.section(b"TRIE")?;
        let parents = tr.u32s()?;
        let labels: Vec<Rank> = tr.u32s()?;
        tr.finish()?;
        let trie = FingerprintTrie::from_arrays(&parents, &labels, sigma)?;

        let mut hash = r.section(b"HASH")?;
        let (p, x, c) = (hash.u64()?, hash.u64()?, hash.u32()?);
        hash.finish()?;
        if !(2..crate::polyhash::MAX_MODULUS).contains(&p) || c == 0 {
            return Err(Error::Format("invalid hash parameters".into()));
        }
        let params = HashParams::new(p, x, sigma.max(1), c as usize);

        let mut bktr = r.section(b"BKTR")?;
        let n = bktr.len(12)?;
        let mut pairs = Vec::with_capacity(n);
        for _ in 0..n {
            pairs.push((bktr.u64()?, bktr.u32()?));
        }
        bktr.finish()?;
        let backtrack = BacktrackFunction::from_pairs(params, &pairs)?;
        if backtrack.len() != trie.fingerprint_count() {
            return Err(Error::Format(
                "backtracking function and trie sizes differ".into(),
            ));
        }

        let mut rept = r.section(b"REPT")?;
        let supports = rept.u32s()?;
        let n = rept.len(8)?;
        let mut ranges = Vec::with_capacity(n);
        for _ in 0..n {
            ranges.push((rept.u32()?, rept.u32()?));
        }
        let offsets = rept.u32s()?;
        rept.finish()?;
        r.finish()?;
        let report = ReportIndex::from_parts(supports, ranges, offsets)?;
        if report.node_count() != trie.len() {
            return Err(Error::Format("report and trie sizes differ".into()));
        }
        if report
            .supports()
            .iter()
            .any(|&m| m == 0 || m as usize > seq.len() + 1)
        {
            return Err(Error::Format("report support out of range".into()));
        }

        Ok(FingerprintIndex {
            alphabet,
            seq,
            trie,
            backtrack,
            report,
            builder,
            seed,
            backtrack_attempts,
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&self.to_bytes())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| Error::Format(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    /// Human-readable dump of every section.
    pub fn to_json(&self) -> Value {
        let symbol = |r: Rank| String::from(self.alphabet.unrank(r).map_or('#', char::from));
        let params = self.backtrack.params();
        let hashes = super::node_hashes(&self.trie, params);
        let nodes: Vec<Value> = (1..self.trie.len())
            .map(|v| {
                let f = self.trie.fingerprint(v);
                let locations: Vec<[usize; 2]> = self
                    .report
                    .locations(v, &f, &self.seq)
                    .into_iter()
                    .map(|l| [l.start, l.end])
                    .collect();
                json!({
                    "node": v,
                    "parent": self.trie.parent(v),
                    "label": symbol(self.trie.label(v)),
                    "string": self.trie.string(v).into_iter().map(symbol).collect::<String>(),
                    "hash": hashes[v],
                    "locations": locations,
                })
            })
            .collect();
        json!({
            "version": VERSION,
            "builder": self.builder.as_str(),
            "seed": self.seed,
            "alphabet": String::from_utf8_lossy(self.alphabet.symbols()),
            "n": self.seq.len(),
            "raw_length": self.seq.raw_len(),
            "sigma": self.seq.sigma(),
            "hash": { "modulus": params.modulus(), "point": params.point(), "depth": params.depth() },
            "fingerprints": self.fingerprint_count(),
            "maximal_locations": self.location_count(),
            "trie": nodes,
        })
    }
}
