//! Single-file field archives.
//!
//! Layout:
//!
//! ```text
//! b"SPCFIELD"                magic, 8 bytes
//! u32 little-endian          header length in bytes
//! header                     UTF-8, one `key=value` per line
//! payload                    little-endian numbers
//! ```
//!
//! Header keys, all required: `version` (currently 1), `kind`, `dims`,
//! `periods`, `components`, `element` (`complex128` or `float64`),
//! `byte_order` (`little-endian`) and `ordering`. Sites are stored
//! lexicographically with axis 3 fastest, components innermost; a complex
//! value is stored as real then imaginary part. The payload holds exactly
//! `sites·components·element_size` bytes.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::clifford::{Covector, SpinorMinus, SpinorPlus};
use crate::forms::{SdForm, TwoForm};
use crate::grid::{Field, Grid};
use crate::lattice::{GaugeTransform, U1Connection};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SPCFIELD";
pub const VERSION: u32 = 1;
const ORDERING: &str = "lexicographic-axis3-fastest-components-innermost";
const BYTE_ORDER: &str = "little-endian";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    SpinorPlus,
    SpinorMinus,
    OneForm,
    TwoForm,
    SdForm,
    Links,
    Gauge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Element {
    Complex128,
    Float64,
}

impl Element {
    pub fn size(self) -> usize {
        match self {
            Element::Complex128 => 16,
            Element::Float64 => 8,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Element::Complex128 => "complex128",
            Element::Float64 => "float64",
        }
    }
}

impl FieldKind {
    pub const ALL: [FieldKind; 7] = [
        FieldKind::SpinorPlus,
        FieldKind::SpinorMinus,
        FieldKind::OneForm,
        FieldKind::TwoForm,
        FieldKind::SdForm,
        FieldKind::Links,
        FieldKind::Gauge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::SpinorPlus => "spinor+",
            FieldKind::SpinorMinus => "spinor-",
            FieldKind::OneForm => "1-form",
            FieldKind::TwoForm => "2-form",
            FieldKind::SdForm => "sdform",
            FieldKind::Links => "links",
            FieldKind::Gauge => "gauge",
        }
    }

    pub fn components(self) -> usize {
        match self {
            FieldKind::SpinorPlus | FieldKind::SpinorMinus => 2,
            FieldKind::OneForm | FieldKind::Links => 4,
            FieldKind::TwoForm => 6,
            FieldKind::SdForm => 3,
            FieldKind::Gauge => 1,
        }
    }

    pub fn element(self) -> Element {
        match self {
            FieldKind::OneForm | FieldKind::TwoForm | FieldKind::SdForm => Element::Float64,
            _ => Element::Complex128,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FieldKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::CorruptHeader(format!("unknown field kind {s:?}")))
    }
}

/// Payload values in file order.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

/// An in-memory archive: kind, grid and flat payload.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldArchive {
    pub kind: FieldKind,
    pub grid: Grid,
    pub payload: Payload,
}

/// Per-site value types that can be archived.
pub trait Archived: Sized + Clone {
    const KIND: FieldKind;
    fn write(&self, out: &mut Payload);
    /// Build one value from its components (already sliced to length).
    fn read(complex: &[Complex64], real: &[f64]) -> Self;
}

macro_rules! complex_archived {
    ($ty:ty, $kind:expr, |$v:ident| $parts:expr, |$c:ident| $build:expr) => {
        impl Archived for $ty {
            const KIND: FieldKind = $kind;
            fn write(&self, out: &mut Payload) {
                let $v = self;
                if let Payload::Complex(buf) = out {
                    buf.extend_from_slice(&$parts);
                }
            }
            fn read($c: &[Complex64], _: &[f64]) -> Self {
                $build
            }
        }
    };
}

macro_rules! real_archived {
    ($ty:ty, $kind:expr, |$v:ident| $parts:expr, |$c:ident| $build:expr) => {
        impl Archived for $ty {
            const KIND: FieldKind = $kind;
            fn write(&self, out: &mut Payload) {
                let $v = self;
                if let Payload::Real(buf) = out {
                    buf.extend_from_slice(&$parts);
                }
            }
            fn read(_: &[Complex64], $c: &[f64]) -> Self {
                $build
            }
        }
    };
}

complex_archived!(SpinorPlus, FieldKind::SpinorPlus, |v| v.0, |c| SpinorPlus([c[0], c[1]]));
complex_archived!(SpinorMinus, FieldKind::SpinorMinus, |v| v.0, |c| SpinorMinus([c[0], c[1]]));
complex_archived!([Complex64; 4], FieldKind::Links, |v| *v, |c| [c[0], c[1], c[2], c[3]]);
complex_archived!(Complex64, FieldKind::Gauge, |v| [*v], |c| c[0]);
real_archived!(Covector, FieldKind::OneForm, |v| v.0, |c| Covector([c[0], c[1], c[2], c[3]]));
real_archived!(TwoForm, FieldKind::TwoForm, |v| v.0, |c| TwoForm(std::array::from_fn(|k| c[k])));
real_archived!(SdForm, FieldKind::SdForm, |v| v.0, |c| SdForm([c[0], c[1], c[2]]));

impl FieldArchive {
    pub fn from_field<T: Archived>(field: &Field<T>) -> Self {
        let n = field.data().len() * T::KIND.components();
        let mut payload = match T::KIND.element() {
            Element::Complex128 => Payload::Complex(Vec::with_capacity(n)),
            Element::Float64 => Payload::Real(Vec::with_capacity(n)),
        };
        for v in field.iter() {
            v.write(&mut payload);
        }
        Self {
            kind: T::KIND,
            grid: *field.grid(),
            payload,
        }
    }

    pub fn to_field<T: Archived>(&self) -> Result<Field<T>> {
        if self.kind != T::KIND {
            return Err(Error::KindMismatch {
                expected: T::KIND.name().into(),
                found: self.kind.name().into(),
            });
        }
        let c = self.kind.components();
        let data: Vec<T> = match &self.payload {
            Payload::Complex(v) => v.chunks_exact(c).map(|chunk| T::read(chunk, &[])).collect(),
            Payload::Real(v) => v.chunks_exact(c).map(|chunk| T::read(&[], chunk)).collect(),
        };
        Field::from_vec(self.grid, data)
    }

    pub fn from_connection(a: &U1Connection) -> Self {
        let links = Field::from_vec(*a.grid(), a.links().to_vec()).expect("connection has one link set per site");
        Self::from_field(&links)
    }

    pub fn to_connection(&self) -> Result<U1Connection> {
        let links: Field<[Complex64; 4]> = self.to_field()?;
        let grid = *links.grid();
        U1Connection::from_links(grid, links.into_vec())
    }

    pub fn from_gauge(s: &GaugeTransform) -> Self {
        let phases = Field::from_vec(*s.grid(), s.phases().to_vec()).expect("one phase per site");
        Self::from_field(&phases)
    }

    pub fn to_gauge(&self) -> Result<GaugeTransform> {
        let phases: Field<Complex64> = self.to_field()?;
        let grid = *phases.grid();
        GaugeTransform::from_phases(grid, phases.into_vec())
    }

    fn header(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "version={VERSION}\nkind={}\ndims={}\nperiods={}\ncomponents={}\nelement={}\nbyte_order={BYTE_ORDER}\nordering={ORDERING}\n",
            self.kind,
            join(self.grid.dims().iter().map(|d| d.to_string()).collect()),
            join(self.grid.periods().iter().map(|p| format!("{p:?}")).collect()),
            self.kind.components(),
            self.kind.element().name(),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = self.header();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        match &self.payload {
            Payload::Complex(v) => {
                out.reserve(v.len() * 16);
                for z in v {
                    out.extend_from_slice(&z.re.to_le_bytes());
                    out.extend_from_slice(&z.im.to_le_bytes());
                }
            }
            Payload::Real(v) => {
                out.reserve(v.len() * 8);
                for x in v {
                    out.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |m: &str| Error::CorruptHeader(m.to_string());
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(corrupt("missing magic"));
        }
        let len = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let body = &bytes[12..];
        if len > body.len() {
            return Err(corrupt("header length exceeds file size"));
        }
        let text = std::str::from_utf8(&body[..len]).map_err(|_| corrupt("header is not UTF-8"))?;
        let header = parse_header(text)?;
        let payload_bytes = &body[len..];

        let sites = header.grid.num_sites();
        let expected = sites * header.kind.components() * header.kind.element().size();
        if payload_bytes.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: payload_bytes.len(),
            });
        }
        let f64_at = |chunk: &[u8]| f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        let payload = match header.kind.element() {
            Element::Complex128 => Payload::Complex(
                payload_bytes
                    .chunks_exact(16)
                    .map(|c| Complex64::new(f64_at(&c[..8]), f64_at(&c[8..])))
                    .collect(),
            ),
            Element::Float64 => Payload::Real(payload_bytes.chunks_exact(8).map(f64_at).collect()),
        };
        Ok(Self {
            kind: header.kind,
            grid: header.grid,
            payload,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Header {
    kind: FieldKind,
    grid: Grid,
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<[T; 4]> {
    let items: Vec<T> = value
        .split(',')
        .map(|s| s.trim().parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::CorruptHeader(format!("bad {key} value {value:?}")))?;
    items
        .try_into()
        .map_err(|_| Error::CorruptHeader(format!("{key} needs four entries")))
}

fn parse_header(text: &str) -> Result<Header> {
    let mut entries = std::collections::BTreeMap::new();
    for line in text.lines().filter(|l| !l.is_empty()) {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::CorruptHeader(format!("malformed line {line:?}")))?;
        if entries.insert(k, v).is_some() {
            return Err(Error::CorruptHeader(format!("duplicate key {k:?}")));
        }
    }
    let get = |k: &str| entries.get(k).copied().ok_or_else(|| Error::CorruptHeader(format!("missing key {k:?}")));

    let version: u32 = get("version")?
        .parse()
        .map_err(|_| Error::CorruptHeader("bad version".into()))?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let known = ["version", "kind", "dims", "periods", "components", "element", "byte_order", "ordering"];
    if let Some(k) = entries.keys().find(|k| !known.contains(k)) {
        return Err(Error::CorruptHeader(format!("unknown key {k:?}")));
    }
    let kind: FieldKind = get("kind")?.parse()?;
    let dims: [usize; 4] = parse_list("dims", get("dims")?)?;
    let periods: [f64; 4] = parse_list("periods", get("periods")?)?;
    let grid = Grid::with_periods(dims, periods).map_err(|e| Error::CorruptHeader(e.to_string()))?;
    let components: usize = get("components")?
        .parse()
        .map_err(|_| Error::CorruptHeader("bad components".into()))?;
    if components != kind.components() {
        return Err(Error::CorruptHeader(format!(
            "{kind} fields have {} components, header says {components}",
            kind.components()
        )));
    }
    if get("element")? != kind.element().name() {
        return Err(Error::CorruptHeader(format!("{kind} fields are stored as {}", kind.element().name())));
    }
    if get("byte_order")? != BYTE_ORDER {
        return Err(Error::CorruptHeader("only little-endian payloads are supported".into()));
    }
    if get("ordering")? != ORDERING {
        return Err(Error::CorruptHeader("unknown site ordering".into()));
    }
    Ok(Header { kind, grid })
}

pub fn save_field<T: Archived>(field: &Field<T>, path: impl AsRef<Path>) -> Result<()> {
    FieldArchive::from_field(field).save(path)
}

pub fn load_field<T: Archived>(path: impl AsRef<Path>) -> Result<Field<T>> {
    FieldArchive::load(path)?.to_field()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::TrigSpinor;

    fn spinor_field() -> Field<SpinorPlus> {
        let g = Grid::with_periods([4, 6, 4, 8], [1.0, 0.1, 2.5, 1.0 / 3.0]).unwrap();
        TrigSpinor::random(1, 1, 0.4).sample(g)
    }

    fn bits(f: &Field<SpinorPlus>) -> Vec<u64> {
        f.iter().flat_map(|p| p.0).flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect()
    }

    #[test]
    fn spinor_round_trip_is_bit_exact() {
        let f = spinor_field();
        let bytes = FieldArchive::from_field(&f).to_bytes();
        let back: Field<SpinorPlus> = FieldArchive::from_bytes(&bytes).unwrap().to_field().unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(bits(&back), bits(&f));
        assert_eq!(FieldArchive::from_field(&back).to_bytes(), bytes);
    }

    #[test]
    fn every_kind_round_trips() {
        let g = Grid::cubic(4).unwrap();
        let a = U1Connection::random(g, 3, 0.5);
        assert_eq!(FieldArchive::from_bytes(&FieldArchive::from_connection(&a).to_bytes()).unwrap().to_connection().unwrap(), a);
        let s = GaugeTransform::random(g, 4);
        assert_eq!(FieldArchive::from_bytes(&FieldArchive::from_gauge(&s).to_bytes()).unwrap().to_gauge().unwrap(), s);
        let sd = Field::from_fn(g, |x| SdForm([x as f64, -0.1, 1e-300]));
        let arch = FieldArchive::from_bytes(&FieldArchive::from_field(&sd).to_bytes()).unwrap();
        assert_eq!(arch.kind, FieldKind::SdForm);
        assert_eq!(arch.to_field::<SdForm>().unwrap(), sd);
        let two = Field::from_fn(g, |x| TwoForm([x as f64, 1.0, 2.0, 3.0, 4.0, f64::MIN_POSITIVE]));
        assert_eq!(FieldArchive::from_field(&two).to_field::<TwoForm>().unwrap(), two);
        let one = Field::from_fn(g, |x| Covector([x as f64, 0.5, -0.5, 0.25]));
        assert_eq!(FieldArchive::from_field(&one).to_field::<Covector>().unwrap(), one);
        let minus = Field::constant(g, SpinorMinus::new(Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)));
        assert_eq!(FieldArchive::from_field(&minus).to_field::<SpinorMinus>().unwrap(), minus);
    }

    #[test]
    fn truncated_payload_is_a_length_mismatch() {
        let bytes = FieldArchive::from_field(&spinor_field()).to_bytes();
        let cut = &bytes[..bytes.len() - 3];
        match FieldArchive::from_bytes(cut) {
            Err(Error::LengthMismatch { expected, actual }) => assert_eq!(expected, actual + 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn future_version_is_unsupported() {
        let arch = FieldArchive::from_field(&spinor_field());
        let header = arch.header().replace("version=1\n", "version=99\n");
        let mut bytes = MAGIC.to_vec();
        bytes.extend_from_slice(&(header.len() as u32).to_le_bytes());
        bytes.extend_from_slice(header.as_bytes());
        assert!(matches!(FieldArchive::from_bytes(&bytes), Err(Error::UnsupportedVersion(99))));
    }

    #[test]
    fn damaged_headers_are_corrupt() {
        let arch = FieldArchive::from_field(&spinor_field());
        let good = arch.header();
        let rebuild = |h: &str| {
            let mut bytes = MAGIC.to_vec();
            bytes.extend_from_slice(&(h.len() as u32).to_le_bytes());
            bytes.extend_from_slice(h.as_bytes());
            bytes
        };
        for bad in [
            good.replace("kind=spinor+", "kind=vector"),
            good.replace("components=2", "components=3"),
            good.replace("element=complex128", "element=float64"),
            good.replace("byte_order=little-endian", "byte_order=big-endian"),
            good.replace("dims=4,6,4,8", "dims=4,6,4"),
            good.replace("dims=4,6,4,8", "dims=4,5,4,8"),
            good.replace("version=1\n", ""),
            format!("{good}extra=1\n"),
            good.replace('=', ":"),
        ] {
            assert!(matches!(FieldArchive::from_bytes(&rebuild(&bad)), Err(Error::CorruptHeader(_))), "{bad}");
        }
        assert!(matches!(FieldArchive::from_bytes(b"NOTFIELD\0\0\0\0"), Err(Error::CorruptHeader(_))));
        let mut long = rebuild(&good);
        long[8] = 0xff;
        long[9] = 0xff;
        assert!(matches!(FieldArchive::from_bytes(&long), Err(Error::CorruptHeader(_))));
    }

    #[test]
    fn wrong_kind_is_reported() {
        let arch = FieldArchive::from_field(&spinor_field());
        assert!(matches!(arch.to_field::<SdForm>(), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn save_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi.spc");
        let f = spinor_field();
        save_field(&f, &path).unwrap();
        let back: Field<SpinorPlus> = load_field(&path).unwrap();
        assert_eq!(bits(&back), bits(&f));
    }
}
