//! Finite-field arithmetic over prime fields GF(p) and binary fields GF(2^w).
//!
//! Elements are plain canonical integers ([`FieldElement`]); a [`Field`] handle
//! interprets them. The canonical encoding is the residue for GF(p) and the
//! coefficient bit pattern (bit `i` is the coefficient of `x^i`) for GF(2^w).
//!
//! GF(2^8) multiplies through log/antilog tables built once per handle;
//! GF(2^16) uses a carry-less multiply followed by polynomial reduction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256_POLY: u32 = 0x11D;
/// Reduction polynomial x^16 + x^5 + x^3 + x^2 + 1.
pub const GF2_16_POLY: u32 = 0x1_002D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime,
    Binary,
}

/// Identifies a finite field. Constructed only through validating constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    // prime: p; binary: (w << 24) | reduction mask
    param: u32,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(Self {
            kind: FieldKind::Prime,
            param: p,
        })
    }

    /// GF(2^width) reduced modulo `poly`, which must include the `x^width` term.
    pub fn binary(width: u32, poly: u32) -> Result<Self> {
        if width != 8 && width != 16 {
            return Err(Error::InvalidField(format!(
                "binary fields of width {width} are not supported (use 8 or 16)"
            )));
        }
        if poly >> width != 1 {
            return Err(Error::InvalidField(format!(
                "reduction polynomial {poly:#x} does not have degree {width}"
            )));
        }
        if !is_irreducible(poly) {
            return Err(Error::InvalidField(format!(
                "reduction polynomial {poly:#x} is reducible"
            )));
        }
        Ok(Self {
            kind: FieldKind::Binary,
            param: (width << 24) | poly,
        })
    }

    pub fn gf256() -> Self {
        Self::binary(8, GF256_POLY).expect("0x11D is irreducible")
    }

    pub fn gf2_16() -> Self {
        Self::binary(16, GF2_16_POLY).expect("0x1002D is irreducible")
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn order(&self) -> u64 {
        match self.kind {
            FieldKind::Prime => self.param as u64,
            FieldKind::Binary => 1u64 << self.width(),
        }
    }

    /// Extension degree for binary fields, 0 for prime fields.
    pub fn width(&self) -> u32 {
        match self.kind {
            FieldKind::Prime => 0,
            FieldKind::Binary => self.param >> 24,
        }
    }

    pub fn reduction_poly(&self) -> Option<u32> {
        match self.kind {
            FieldKind::Prime => None,
            FieldKind::Binary => Some(self.param & 0x00FF_FFFF),
        }
    }

    /// Bytes per stored symbol when the field maps onto whole bytes.
    pub fn bytes_per_symbol(&self) -> Option<usize> {
        match (self.kind, self.width()) {
            (FieldKind::Binary, 8) => Some(1),
            (FieldKind::Binary, 16) => Some(2),
            _ => None,
        }
    }

    pub const ENCODED_LEN: usize = 5;

    /// One kind byte followed by the 32-bit little-endian parameter.
    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0] = match self.kind {
            FieldKind::Prime => 0,
            FieldKind::Binary => 1,
        };
        out[1..].copy_from_slice(&self.param.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < Self::ENCODED_LEN {
            return Err(Error::InvalidField("field spec needs 5 bytes".into()));
        }
        let param = u32::from_le_bytes(bytes[1..5].try_into().unwrap());
        match bytes[0] {
            0 => Self::prime(param),
            1 => Self::binary(param >> 24, param & 0x00FF_FFFF),
            k => Err(Error::InvalidField(format!("unknown field kind {k}"))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Prime => write!(f, "GF({})", self.param),
            FieldKind::Binary => write!(
                f,
                "GF(2^{})/{:#x}",
                self.width(),
                self.reduction_poly().unwrap()
            ),
        }
    }
}

/// Accepts `gf256`, `gf2_16`, `gf<p>` for a prime `p`, and `prime:<p>`.
impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "gf256" | "gf2_8" => return Ok(Self::gf256()),
            "gf65536" | "gf2_16" => return Ok(Self::gf2_16()),
            _ => {}
        }
        let digits = lower
            .strip_prefix("prime:")
            .or_else(|| lower.strip_prefix("gf"))
            .ok_or_else(|| Error::InvalidField(format!("unrecognized field {s:?}")))?;
        let p: u32 = digits
            .parse()
            .map_err(|_| Error::InvalidField(format!("unrecognized field {s:?}")))?;
        Self::prime(p)
    }
}

/// Canonical encoding of a field element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);

    /// Wraps a raw value without range checking; see [`Field::element`].
    pub const fn from_raw(value: u32) -> Self {
        Self(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct LogTables {
    log: [u16; 256],
    exp: [u8; 510],
}

#[derive(Clone)]
enum Arith {
    Prime(u32),
    Log8(Arc<LogTables>),
    Clmul16(u32),
}

/// Arithmetic handle for one field. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    spec: FieldSpec,
    arith: Arith,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Field").field(&self.spec).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let arith = match spec.kind {
            FieldKind::Prime => Arith::Prime(spec.param),
            FieldKind::Binary if spec.width() == 8 => {
                Arith::Log8(Arc::new(build_log_tables(spec.reduction_poly().unwrap())))
            }
            FieldKind::Binary => Arith::Clmul16(spec.reduction_poly().unwrap()),
        };
        Self { spec, arith }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u64 {
        self.spec.order()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Range-checked construction from a canonical value.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(Error::ForeignElement {
                value,
                order: self.order(),
            });
        }
        Ok(FieldElement(value as u32))
    }

    /// The element whose canonical encoding is `j`; a bijection `[0, q) -> F`.
    pub fn enumerate(&self, j: u64) -> Result<FieldElement> {
        self.element(j)
            .map_err(|_| Error::OutOfRange(format!("enumerate({j}) outside [0, {})", self.order())))
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        (x.0 as u64) < self.order()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.random_range(0..self.order()) as u32)
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        debug_assert!(self.contains(x) && self.contains(y));
        match self.arith {
            Arith::Prime(p) => {
                let s = x.0 as u64 + y.0 as u64;
                FieldElement((s % p as u64) as u32)
            }
            _ => FieldElement(x.0 ^ y.0),
        }
    }

    #[inline]
    pub fn neg(&self, x: FieldElement) -> FieldElement {
        match self.arith {
            Arith::Prime(p) if x.0 != 0 => FieldElement(p - x.0),
            _ => x,
        }
    }

    #[inline]
    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        debug_assert!(self.contains(x) && self.contains(y));
        match &self.arith {
            Arith::Prime(p) => FieldElement(((x.0 as u64 * y.0 as u64) % *p as u64) as u32),
            Arith::Log8(t) => {
                if x.0 == 0 || y.0 == 0 {
                    FieldElement(0)
                } else {
                    let idx = t.log[x.0 as usize] as usize + t.log[y.0 as usize] as usize;
                    FieldElement(t.exp[idx] as u32)
                }
            }
            Arith::Clmul16(poly) => FieldElement(reduce(clmul(x.0, y.0), *poly, 16)),
        }
    }

    /// `acc + x * y`
    #[inline]
    pub fn mul_add(&self, acc: FieldElement, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(acc, self.mul(x, y))
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.0 == 0 {
            return Err(Error::NotInvertible);
        }
        Ok(match &self.arith {
            Arith::Log8(t) => FieldElement(t.exp[(255 - t.log[x.0 as usize]) as usize] as u32),
            _ => self.pow(x, self.order() - 2),
        })
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^t` with `0^0 = 1`.
    pub fn pow(&self, x: FieldElement, mut t: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while t > 0 {
            if t & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            t >>= 1;
        }
        acc
    }

    /// Addition that rejects operands outside this field.
    pub fn try_add(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add(x, y))
    }

    /// Multiplication that rejects operands outside this field.
    pub fn try_mul(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    fn check(&self, x: FieldElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ForeignElement {
                value: x.0 as u64,
                order: self.order(),
            })
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn degree(poly: u32) -> i32 {
    31 - poly.leading_zeros() as i32
}

fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

fn is_irreducible(poly: u32) -> bool {
    let d = degree(poly);
    // every divisor of degree 1..=d/2, i.e. polynomials in [2, 2^(d/2+1))
    (2u32..(1u32 << (d / 2 + 1))).all(|f| poly_mod(poly, f) != 0)
}

#[inline]
fn clmul(a: u32, b: u32) -> u32 {
    let mut acc = 0u32;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

#[inline]
fn reduce(mut v: u32, poly: u32, width: u32) -> u32 {
    for bit in (width..2 * width - 1).rev() {
        if v & (1 << bit) != 0 {
            v ^= poly << (bit - width);
        }
    }
    v
}

fn build_log_tables(poly: u32) -> LogTables {
    let mul = |a: u32, b: u32| reduce(clmul(a, b), poly, 8);
    let pow = |g: u32, mut e: u32| {
        let (mut acc, mut base) = (1u32, g);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    // 255 = 3 * 5 * 17
    let generator = (2u32..256)
        .find(|&g| [3u32, 5, 17].iter().all(|&p| pow(g, 255 / p) != 1))
        .expect("the multiplicative group of GF(2^8) is cyclic");

    let mut log = [0u16; 256];
    let mut exp = [0u8; 510];
    let mut v = 1u32;
    for i in 0..255 {
        exp[i] = v as u8;
        exp[i + 255] = v as u8;
        log[v as usize] = i as u16;
        v = mul(v, generator);
    }
    LogTables { log, exp }
}
