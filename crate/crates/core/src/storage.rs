//! Byte striping and the on-disk chunk format.
//!
//! A file is cut into stripes of `k * l` data symbols. Inside a stripe,
//! symbol `a * k + i` (0-based node `i`) holds cell `(a, i)`; the last stripe
//! is zero-padded. Node `i` of every stripe goes to one chunk file whose
//! payload is stripe-major, then coordinate ascending. GF(2^16) symbols take
//! two little-endian bytes.
//!
//! Chunk header (little-endian, 49 bytes):
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `OAMC` |
//! | 1 | version (1) |
//! | 14 | code spec |
//! | 2 | node index (1-based) |
//! | 8 | stripe count |
//! | 8 | payload byte length |
//! | 8 | original file length |
//! | 4 | CRC-32 of all preceding header bytes |

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::code::{CodeParams, CodeSpec};
use crate::codec::{Encoder, ErasureDecoder, ErasurePattern};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::repair::{audit_access, AccessReport, AccessTrace, HelperReads, RepairPlan, Repairer};

pub const CHUNK_MAGIC: [u8; 4] = *b"OAMC";
pub const CHUNK_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 4 + 1 + CodeSpec::ENCODED_LEN + 2 + 8 + 8 + 8 + 4;

/// Bytes per symbol for file workflows; prime fields are rejected.
pub fn symbol_width(field: FieldSpec) -> Result<usize> {
    field.bytes_per_symbol().ok_or_else(|| {
        Error::Unsupported(format!(
            "field {field} does not map onto bytes; use gf256 or gf2_16 for files"
        ))
    })
}

pub fn symbols_to_bytes(width: usize, symbols: &[FieldElement], out: &mut Vec<u8>) {
    for x in symbols {
        match width {
            1 => out.push(x.value() as u8),
            _ => out.extend_from_slice(&(x.value() as u16).to_le_bytes()),
        }
    }
}

pub fn bytes_to_symbols(width: usize, bytes: &[u8]) -> Vec<FieldElement> {
    match width {
        1 => bytes
            .iter()
            .map(|&b| FieldElement::from_raw(b as u32))
            .collect(),
        _ => bytes
            .chunks_exact(2)
            .map(|c| FieldElement::from_raw(u16::from_le_bytes([c[0], c[1]]) as u32))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripeLayout {
    pub original_len: u64,
    pub stripes: u64,
    pub symbol_width: usize,
    /// Symbols per node per stripe (`l`).
    pub node_symbols: usize,
    /// Data symbols per stripe (`k * l`).
    pub data_symbols: usize,
}

impl StripeLayout {
    pub fn new(params: &CodeParams, original_len: u64) -> Result<Self> {
        let symbol_width = symbol_width(params.spec().field)?;
        let data_symbols = params.k() * params.l();
        let stripe_bytes = (data_symbols * symbol_width) as u64;
        Ok(Self {
            original_len,
            stripes: original_len.div_ceil(stripe_bytes),
            symbol_width,
            node_symbols: params.l(),
            data_symbols,
        })
    }

    pub fn stripe_bytes(&self) -> usize {
        self.data_symbols * self.symbol_width
    }

    /// Bytes stored per node per stripe.
    pub fn node_bytes(&self) -> usize {
        self.node_symbols * self.symbol_width
    }

    pub fn payload_len(&self) -> u64 {
        self.stripes * self.node_bytes() as u64
    }
}

/// Splits `bytes` into stripes, each given as `k` data columns of length `l`.
pub fn stripe_file(params: &CodeParams, bytes: &[u8]) -> Result<Vec<Vec<Vec<FieldElement>>>> {
    let layout = StripeLayout::new(params, bytes.len() as u64)?;
    let (k, l) = (params.k(), params.l());
    Ok(bytes
        .chunks(layout.stripe_bytes())
        .map(|chunk| {
            let mut padded = chunk.to_vec();
            padded.resize(layout.stripe_bytes(), 0);
            let symbols = bytes_to_symbols(layout.symbol_width, &padded);
            (0..k)
                .map(|i| (0..l).map(|a| symbols[a * k + i]).collect())
                .collect()
        })
        .collect())
}

/// Inverse of [`stripe_file`]: concatenates the data cells and cuts to `original_len`.
pub fn unstripe(
    params: &CodeParams,
    stripes: &[Vec<Vec<FieldElement>>],
    original_len: u64,
) -> Result<Vec<u8>> {
    let layout = StripeLayout::new(params, original_len)?;
    if stripes.len() as u64 != layout.stripes {
        return Err(Error::Dimension(format!(
            "{} stripes for a {original_len}-byte file, expected {}",
            stripes.len(),
            layout.stripes
        )));
    }
    let (k, l) = (params.k(), params.l());
    let mut out = Vec::with_capacity(stripes.len() * layout.stripe_bytes());
    let mut row = Vec::with_capacity(k);
    for data in stripes {
        if data.len() < k || data.iter().take(k).any(|c| c.len() != l) {
            return Err(Error::Dimension(
                "stripe does not hold k columns of length l".into(),
            ));
        }
        for a in 0..l {
            row.clear();
            row.extend(data.iter().take(k).map(|c| c[a]));
            symbols_to_bytes(layout.symbol_width, &row, &mut out);
        }
    }
    out.truncate(original_len as usize);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChunkHeader {
    pub spec: CodeSpec,
    pub node: u16,
    pub stripe_count: u64,
    pub payload_len: u64,
    pub original_len: u64,
}

impl ChunkHeader {
    pub fn new(params: &CodeParams, node: usize, layout: &StripeLayout) -> Self {
        Self {
            spec: *params.spec(),
            node: node as u16,
            stripe_count: layout.stripes,
            payload_len: layout.payload_len(),
            original_len: layout.original_len,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        let mut w = &mut out[..];
        w.write_all(&CHUNK_MAGIC).unwrap();
        w.write_all(&[CHUNK_VERSION]).unwrap();
        w.write_all(&self.spec.to_bytes()).unwrap();
        w.write_all(&self.node.to_le_bytes()).unwrap();
        w.write_all(&self.stripe_count.to_le_bytes()).unwrap();
        w.write_all(&self.payload_len.to_le_bytes()).unwrap();
        w.write_all(&self.original_len.to_le_bytes()).unwrap();
        let crc = crc32fast::hash(&out[..HEADER_LEN - 4]);
        out[HEADER_LEN - 4..].copy_from_slice(&crc.to_le_bytes());
        out
    }

    /// Validates magic, CRC, version and internal consistency, in that order.
    pub fn parse(path: &Path, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                path: path.into(),
                detail: format!("header is {} of {HEADER_LEN} bytes", bytes.len()),
            });
        }
        if bytes[..4] != CHUNK_MAGIC {
            return Err(Error::BadMagic { path: path.into() });
        }
        let stored = u32::from_le_bytes(bytes[HEADER_LEN - 4..HEADER_LEN].try_into().unwrap());
        let computed = crc32fast::hash(&bytes[..HEADER_LEN - 4]);
        if stored != computed {
            return Err(Error::HeaderCrc {
                path: path.into(),
                stored,
                computed,
            });
        }
        if bytes[4] != CHUNK_VERSION {
            return Err(Error::VersionMismatch {
                path: path.into(),
                found: bytes[4],
            });
        }
        let corrupt = |detail: String| Error::Corrupt {
            path: path.into(),
            detail,
        };
        let spec = CodeSpec::from_bytes(&bytes[5..5 + CodeSpec::ENCODED_LEN])
            .map_err(|e| corrupt(e.to_string()))?;
        let mut pos = 5 + CodeSpec::ENCODED_LEN;
        let mut take = |n: usize| {
            let s = &bytes[pos..pos + n];
            pos += n;
            s
        };
        let node = u16::from_le_bytes(take(2).try_into().unwrap());
        let stripe_count = u64::from_le_bytes(take(8).try_into().unwrap());
        let payload_len = u64::from_le_bytes(take(8).try_into().unwrap());
        let original_len = u64::from_le_bytes(take(8).try_into().unwrap());
        let header = Self {
            spec,
            node,
            stripe_count,
            payload_len,
            original_len,
        };
        let params = spec.build().map_err(|e| corrupt(e.to_string()))?;
        params
            .check_node(node as usize)
            .map_err(|e| corrupt(e.to_string()))?;
        let layout =
            StripeLayout::new(&params, original_len).map_err(|e| corrupt(e.to_string()))?;
        if layout.stripes != stripe_count || layout.payload_len() != payload_len {
            return Err(corrupt(format!(
                "header claims {stripe_count} stripes / {payload_len} bytes, layout needs {} / {}",
                layout.stripes,
                layout.payload_len()
            )));
        }
        Ok(header)
    }

    pub fn layout(&self) -> Result<StripeLayout> {
        StripeLayout::new(&self.spec.build()?, self.original_len)
    }
}

pub fn chunk_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(format!("node_{node}.oamc"))
}

/// Writes header and payload to a temporary file, then renames it into place.
pub fn write_chunk(path: &Path, header: &ChunkHeader, payload: &[u8]) -> Result<()> {
    if payload.len() as u64 != header.payload_len {
        return Err(Error::Dimension(format!(
            "payload is {} bytes, header says {}",
            payload.len(),
            header.payload_len
        )));
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = File::create(&tmp)?;
        file.write_all(&header.to_bytes())?;
        file.write_all(payload)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_chunk_header(path: &Path) -> Result<ChunkHeader> {
    let mut buf = Vec::with_capacity(HEADER_LEN);
    File::open(path)?
        .take(HEADER_LEN as u64)
        .read_to_end(&mut buf)?;
    ChunkHeader::parse(path, &buf)
}

pub fn read_chunk(path: &Path) -> Result<(ChunkHeader, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let header = ChunkHeader::parse(path, &bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let expected = header.payload_len as usize;
    if payload.len() < expected {
        return Err(Error::Truncated {
            path: path.into(),
            detail: format!("payload is {} of {expected} bytes", payload.len()),
        });
    }
    if payload.len() > expected {
        return Err(Error::Corrupt {
            path: path.into(),
            detail: format!("{} trailing bytes after payload", payload.len() - expected),
        });
    }
    Ok((header, payload.to_vec()))
}

/// Positional reader over one helper chunk that records every symbol it returns.
pub struct InstrumentedReader {
    file: File,
    path: PathBuf,
    node: usize,
    width: usize,
    node_bytes: u64,
    stripes: u64,
    bytes_read: u64,
}

impl InstrumentedReader {
    pub fn open(path: &Path, expected: &ChunkHeader) -> Result<Self> {
        let header = read_chunk_header(path)?;
        if header.spec != expected.spec || header.original_len != expected.original_len {
            return Err(Error::Corrupt {
                path: path.into(),
                detail: "chunk belongs to a different encoding".into(),
            });
        }
        let file = File::open(path)?;
        let len = file.metadata()?.len();
        if len != HEADER_LEN as u64 + header.payload_len {
            return Err(Error::Truncated {
                path: path.into(),
                detail: format!(
                    "file is {len} bytes, expected {}",
                    HEADER_LEN as u64 + header.payload_len
                ),
            });
        }
        let layout = header.layout()?;
        Ok(Self {
            file,
            path: path.into(),
            node: header.node as usize,
            width: layout.symbol_width,
            node_bytes: layout.node_bytes() as u64,
            stripes: header.stripe_count,
            bytes_read: 0,
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn bytes_read(&self) -> u64 {
        self.bytes_read
    }

    /// Reads `coords` (ascending) of one stripe, one `pread` per contiguous run.
    pub fn read_coords(
        &mut self,
        stripe: u64,
        coords: &[usize],
        trace: &mut AccessTrace,
        trace_stripe: usize,
    ) -> Result<Vec<FieldElement>> {
        if stripe >= self.stripes {
            return Err(Error::OutOfRange(format!(
                "stripe {stripe} of {}",
                self.stripes
            )));
        }
        let base = HEADER_LEN as u64 + stripe * self.node_bytes;
        let mut out = Vec::with_capacity(coords.len());
        let mut buf = Vec::new();
        let mut start = 0;
        while start < coords.len() {
            let mut end = start + 1;
            while end < coords.len() && coords[end] == coords[end - 1] + 1 {
                end += 1;
            }
            buf.resize((end - start) * self.width, 0);
            let offset = base + (coords[start] * self.width) as u64;
            self.file
                .read_exact_at(&mut buf, offset)
                .map_err(|e| match e.kind() {
                    io::ErrorKind::UnexpectedEof => Error::Truncated {
                        path: self.path.clone(),
                        detail: format!("short read at offset {offset}"),
                    },
                    _ => Error::Io(e),
                })?;
            self.bytes_read += buf.len() as u64;
            for &a in &coords[start..end] {
                trace.record(trace_stripe, self.node, a);
            }
            out.extend(bytes_to_symbols(self.width, &buf));
            start = end;
        }
        Ok(out)
    }
}

/// Encodes `data` and writes `n` chunk files into `dir`.
pub fn encode_to_dir(params: &CodeParams, data: &[u8], dir: &Path) -> Result<Vec<PathBuf>> {
    let layout = StripeLayout::new(params, data.len() as u64)?;
    let encoder = Encoder::new(params)?;
    let stripes = stripe_file(params, data)?;
    let codewords = stripes
        .par_iter()
        .map(|d| encoder.encode(params, d))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(dir)?;
    (1..=params.n())
        .into_par_iter()
        .map(|i| {
            let mut payload = Vec::with_capacity(layout.payload_len() as usize);
            for cw in &codewords {
                symbols_to_bytes(layout.symbol_width, cw.node(i), &mut payload);
            }
            let path = chunk_path(dir, i);
            write_chunk(&path, &ChunkHeader::new(params, i, &layout), &payload)?;
            Ok(path)
        })
        .collect()
}

/// First valid chunk header in `dir`, skipping node `exclude`. Reads headers only.
pub fn probe_header(dir: &Path, exclude: usize) -> Result<ChunkHeader> {
    let mut nodes: Vec<usize> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        if let Some(i) = parse_chunk_name(name) {
            nodes.push(i);
        }
    }
    nodes.sort_unstable();
    nodes
        .into_iter()
        .filter(|&i| i != exclude)
        .find_map(|i| read_chunk_header(&chunk_path(dir, i)).ok())
        .ok_or(Error::InsufficientChunks {
            present: 0,
            needed: 1,
        })
}

fn parse_chunk_name(name: &str) -> Option<usize> {
    name.strip_prefix("node_")?
        .strip_suffix(".oamc")?
        .parse()
        .ok()
}

#[derive(Clone, Debug, Default)]
pub struct ChunkScan {
    pub header: Option<ChunkHeader>,
    /// Valid chunks by node index.
    pub present: BTreeMap<usize, Vec<u8>>,
    /// Chunk files that failed validation, with the reason.
    pub rejected: Vec<(PathBuf, String)>,
}

/// Loads every `node_<i>.oamc` in `dir`. Chunks that fail validation or
/// disagree with the majority header are rejected rather than fatal.
pub fn scan_dir(dir: &Path) -> Result<ChunkScan> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        if let Some(i) = parse_chunk_name(name) {
            found.push((i, path));
        }
    }
    found.sort();
    let mut scan = ChunkScan::default();
    let mut loaded = Vec::new();
    for (i, path) in found {
        match read_chunk(&path) {
            Ok((h, payload)) if h.node as usize == i => loaded.push((h, payload)),
            Ok((h, _)) => scan.rejected.push((
                path,
                format!("file name says node {i}, header says {}", h.node),
            )),
            Err(e) => scan.rejected.push((path, e.to_string())),
        }
    }
    // the most common (spec, length) pair wins
    let mut votes: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for (h, _) in &loaded {
        *votes.entry(key(h)).or_default() += 1;
    }
    let Some(winner) = votes.into_iter().max_by_key(|(_, c)| *c).map(|(k, _)| k) else {
        return Ok(scan);
    };
    for (h, payload) in loaded {
        if key(&h) == winner {
            scan.header.get_or_insert(ChunkHeader { node: 0, ..h });
            scan.present.insert(h.node as usize, payload);
        } else {
            scan.rejected.push((
                chunk_path(dir, h.node as usize),
                "header disagrees with the other chunks".into(),
            ));
        }
    }
    Ok(scan)
}

fn key(h: &ChunkHeader) -> Vec<u8> {
    let mut k = h.spec.to_bytes().to_vec();
    k.extend_from_slice(&h.original_len.to_le_bytes());
    k
}

/// Reconstructs the original bytes from whatever valid chunks `dir` holds.
pub fn decode_dir(dir: &Path) -> Result<(Vec<u8>, ChunkScan)> {
    let scan = scan_dir(dir)?;
    let Some(header) = scan.header else {
        return Err(Error::InsufficientChunks {
            present: 0,
            needed: 1,
        });
    };
    let params = header.spec.build()?;
    if scan.present.len() < params.k() {
        return Err(Error::InsufficientChunks {
            present: scan.present.len(),
            needed: params.k(),
        });
    }
    let layout = header.layout()?;
    let erased: Vec<usize> = (1..=params.n())
        .filter(|i| !scan.present.contains_key(i))
        .collect();
    let decoder = ErasureDecoder::new(&params, &erased)?;
    let node_bytes = layout.node_bytes();
    let stripes = (0..layout.stripes as usize)
        .into_par_iter()
        .map(|s| {
            let nodes = (1..=params.n())
                .map(|i| {
                    scan.present.get(&i).map(|p| {
                        bytes_to_symbols(
                            layout.symbol_width,
                            &p[s * node_bytes..(s + 1) * node_bytes],
                        )
                    })
                })
                .collect();
            let cw = decoder.recover(&params, &ErasurePattern::new(nodes))?;
            Ok(cw.data(params.k()).to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let bytes = unstripe(&params, &stripes, header.original_len)?;
    Ok((bytes, scan))
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub path: PathBuf,
    /// One audit per batch of stripes, with the first stripe of each batch.
    pub batches: Vec<(u64, AccessReport)>,
    pub bytes_read: u64,
}

/// Rebuilds `plan.failed()`'s chunk, reading only the plan's coordinates from
/// each helper chunk. Reads are audited per batch of `batch_stripes` stripes.
pub fn repair_in_dir(
    dir: &Path,
    params: &CodeParams,
    plan: &RepairPlan,
    batch_stripes: u64,
) -> Result<RepairOutcome> {
    let mut header = None;
    for &h in plan.helpers() {
        let path = chunk_path(dir, h);
        if !path.exists() {
            return Err(Error::InsufficientChunks {
                present: plan
                    .helpers()
                    .iter()
                    .filter(|&&x| chunk_path(dir, x).exists())
                    .count(),
                needed: plan.d(),
            });
        }
        let hh = read_chunk_header(&path)?;
        if hh.spec != *params.spec() {
            return Err(Error::Corrupt {
                path,
                detail: "chunk was written with different code parameters".into(),
            });
        }
        header.get_or_insert(hh);
    }
    let header = header.ok_or_else(|| Error::InvalidPlan("plan has no helpers".into()))?;
    let mut readers = plan
        .helpers()
        .iter()
        .map(|&h| InstrumentedReader::open(&chunk_path(dir, h), &header))
        .collect::<Result<Vec<_>>>()?;
    let layout = header.layout()?;
    let repairer = Repairer::new(params, plan.clone())?;
    let batch = batch_stripes.max(1);

    let mut payload = Vec::with_capacity(layout.payload_len() as usize);
    let mut batches = Vec::new();
    let mut stripe = 0;
    while stripe < layout.stripes {
        let count = batch.min(layout.stripes - stripe);
        let mut trace = AccessTrace::new(count as usize);
        for offset in 0..count {
            let mut reads = HelperReads::new(plan.coords().to_vec());
            for reader in readers.iter_mut() {
                let values = reader.read_coords(
                    stripe + offset,
                    plan.coords(),
                    &mut trace,
                    offset as usize,
                )?;
                reads.insert(reader.node(), values)?;
            }
            let column = repairer.repair(params, &reads)?;
            symbols_to_bytes(layout.symbol_width, &column, &mut payload);
        }
        batches.push((stripe, audit_access(params, plan, &trace)?));
        stripe += count;
    }
    let path = chunk_path(dir, plan.failed());
    write_chunk(
        &path,
        &ChunkHeader {
            node: plan.failed() as u16,
            ..header
        },
        &payload,
    )?;
    Ok(RepairOutcome {
        path,
        batches,
        bytes_read: readers.iter().map(InstrumentedReader::bytes_read).sum(),
    })
}
