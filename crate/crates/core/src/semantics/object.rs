use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::BiMagma;

pub const DEFAULT_SIZE_CAP: u64 = 65_536;

/// Element of a finite object. `L`, `R`, `B` are the tags `(a,0)`, `(b,1)`
/// and `(a,b)` of the ⊕ construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Star,
    Scal(u16),
    Pair(Arc<Elem>, Arc<Elem>),
    /// Outputs in the canonical order of the domain.
    Fn(Arc<[Elem]>),
    L(Arc<Elem>),
    R(Arc<Elem>),
    B(Arc<Elem>, Arc<Elem>),
}

impl Elem {
    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Arc::new(a), Arc::new(b))
    }
    pub fn l(a: Elem) -> Elem {
        Elem::L(Arc::new(a))
    }
    pub fn r(b: Elem) -> Elem {
        Elem::R(Arc::new(b))
    }
    pub fn b(a: Elem, b: Elem) -> Elem {
        Elem::B(Arc::new(a), Arc::new(b))
    }
}

/// A magma given by tables, with an optional scalar action (rows are scalars).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMagma {
    pub op: Vec<Vec<u16>>,
    pub act: Option<Vec<Vec<u16>>>,
}

impl FiniteMagma {
    pub fn len(&self) -> usize {
        self.op.len()
    }

    pub fn is_empty(&self) -> bool {
        self.op.is_empty()
    }
}

#[derive(Clone, Debug)]
pub enum Shape {
    Empty,
    Unit,
    Scalars(Arc<BiMagma>),
    Magma(Arc<FiniteMagma>),
    Prod(SemObject, SemObject),
    Hom(SemObject, SemObject),
    Cp(SemObject, SemObject),
}

#[derive(Debug)]
struct Inner {
    shape: Shape,
    size: Option<u64>,
    carrier: OnceLock<Arc<[Elem]>>,
}

/// A finite carrier with its magma operation and, where defined, a scalar action.
#[derive(Clone, Debug)]
pub struct SemObject(Arc<Inner>);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("size cap exceeded: {what} has {} elements, cap is {cap}", size_text(*.size))]
    SizeCap {
        what: String,
        size: Option<u64>,
        cap: u64,
    },
    #[error("shape mismatch: expected {expected}, found {actual}")]
    ShapeMismatch { expected: String, actual: String },
    #[error("{0}")]
    Undefined(String),
}

fn size_text(s: Option<u64>) -> String {
    match s {
        Some(n) => n.to_string(),
        None => "more than 2^64".to_string(),
    }
}

pub(crate) fn mismatch(expected: impl fmt::Display, actual: impl fmt::Display) -> SemError {
    SemError::ShapeMismatch {
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

fn undefined(what: &str, obj: &SemObject) -> SemError {
    SemError::Undefined(format!("{what} is not defined on {obj}"))
}

impl SemObject {
    fn make(shape: Shape) -> SemObject {
        let size = match &shape {
            Shape::Empty => Some(0),
            Shape::Unit => Some(1),
            Shape::Scalars(s) => Some(s.len() as u64),
            Shape::Magma(m) => Some(m.len() as u64),
            Shape::Prod(a, b) => a.size().zip(b.size()).and_then(|(x, y)| x.checked_mul(y)),
            Shape::Hom(a, b) => match (a.size(), b.size()) {
                (Some(0), _) => Some(1),
                (Some(n), Some(m)) => u32::try_from(n).ok().and_then(|n| m.checked_pow(n)),
                _ => None,
            },
            Shape::Cp(a, b) => match (a.size(), b.size()) {
                (Some(x), Some(y)) => x
                    .checked_mul(y)
                    .and_then(|p| p.checked_add(x))
                    .and_then(|p| p.checked_add(y)),
                _ => None,
            },
        };
        SemObject(Arc::new(Inner {
            shape,
            size,
            carrier: OnceLock::new(),
        }))
    }

    pub fn empty() -> SemObject {
        SemObject::make(Shape::Empty)
    }
    pub fn unit() -> SemObject {
        SemObject::make(Shape::Unit)
    }
    pub fn scalars(s: Arc<BiMagma>) -> SemObject {
        SemObject::make(Shape::Scalars(s))
    }
    pub fn magma(m: FiniteMagma) -> SemObject {
        SemObject::make(Shape::Magma(Arc::new(m)))
    }
    pub fn prod(a: &SemObject, b: &SemObject) -> SemObject {
        SemObject::make(Shape::Prod(a.clone(), b.clone()))
    }
    pub fn hom(a: &SemObject, b: &SemObject) -> SemObject {
        SemObject::make(Shape::Hom(a.clone(), b.clone()))
    }
    pub fn cp(a: &SemObject, b: &SemObject) -> SemObject {
        SemObject::make(Shape::Cp(a.clone(), b.clone()))
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    /// `None` when the size does not fit in 64 bits.
    pub fn size(&self) -> Option<u64> {
        self.0.size
    }

    pub fn check_cap(&self, cap: u64) -> Result<(), SemError> {
        match self.size() {
            Some(n) if n <= cap => Ok(()),
            size => Err(SemError::SizeCap {
                what: self.to_string(),
                size,
                cap,
            }),
        }
    }

    /// Elements in canonical order.
    pub fn carrier(&self, cap: u64) -> Result<Arc<[Elem]>, SemError> {
        self.check_cap(cap)?;
        if let Some(c) = self.0.carrier.get() {
            return Ok(c.clone());
        }
        let built: Arc<[Elem]> = self.build_carrier(cap)?.into();
        Ok(self.0.carrier.get_or_init(|| built).clone())
    }

    fn build_carrier(&self, cap: u64) -> Result<Vec<Elem>, SemError> {
        Ok(match self.shape() {
            Shape::Empty => vec![],
            Shape::Unit => vec![Elem::Star],
            Shape::Scalars(s) => (0..s.len() as u16).map(Elem::Scal).collect(),
            Shape::Magma(m) => (0..m.len() as u16).map(Elem::Scal).collect(),
            Shape::Prod(a, b) => {
                let (ca, cb) = (a.carrier(cap)?, b.carrier(cap)?);
                let mut out = Vec::with_capacity(ca.len() * cb.len());
                for x in ca.iter() {
                    for y in cb.iter() {
                        out.push(Elem::pair(x.clone(), y.clone()));
                    }
                }
                out
            }
            Shape::Hom(a, b) => {
                let n = a.size().unwrap_or(0) as usize;
                let cb = b.carrier(cap)?;
                let total = self.size().unwrap_or(0) as usize;
                let mut out = Vec::with_capacity(total);
                let mut digits = vec![0usize; n];
                for _ in 0..total {
                    out.push(Elem::Fn(digits.iter().map(|&d| cb[d].clone()).collect()));
                    for d in digits.iter_mut().rev() {
                        *d += 1;
                        if *d < cb.len() {
                            break;
                        }
                        *d = 0;
                    }
                }
                out
            }
            Shape::Cp(a, b) => {
                let (ca, cb) = (a.carrier(cap)?, b.carrier(cap)?);
                let mut out = Vec::new();
                out.extend(ca.iter().map(|x| Elem::l(x.clone())));
                out.extend(cb.iter().map(|y| Elem::r(y.clone())));
                for x in ca.iter() {
                    for y in cb.iter() {
                        out.push(Elem::b(x.clone(), y.clone()));
                    }
                }
                out
            }
        })
    }

    fn sz(&self) -> Result<u64, SemError> {
        self.size().ok_or_else(|| SemError::SizeCap {
            what: self.to_string(),
            size: None,
            cap: u64::MAX,
        })
    }

    /// Position of `e` in the canonical carrier.
    pub fn rank(&self, e: &Elem) -> Result<u64, SemError> {
        let bad = || mismatch(format!("an element of {self}"), format!("{e:?}"));
        match (self.shape(), e) {
            (Shape::Unit, Elem::Star) => Ok(0),
            (Shape::Scalars(s), Elem::Scal(i)) if (*i as usize) < s.len() => Ok(*i as u64),
            (Shape::Magma(m), Elem::Scal(i)) if (*i as usize) < m.len() => Ok(*i as u64),
            (Shape::Prod(a, b), Elem::Pair(x, y)) => Ok(a.rank(x)? * b.sz()? + b.rank(y)?),
            (Shape::Hom(a, b), Elem::Fn(g)) if g.len() as u64 == a.sz()? => {
                let m = b.sz()?;
                let mut r = 0u64;
                for o in g.iter() {
                    r = r * m + b.rank(o)?;
                }
                Ok(r)
            }
            (Shape::Cp(a, _), Elem::L(x)) => a.rank(x),
            (Shape::Cp(a, b), Elem::R(y)) => Ok(a.sz()? + b.rank(y)?),
            (Shape::Cp(a, b), Elem::B(x, y)) => {
                Ok(a.sz()? + b.sz()? + a.rank(x)? * b.sz()? + b.rank(y)?)
            }
            _ => Err(bad()),
        }
    }

    /// The magma operation; on `Cp` this is the nine-case table.
    pub fn op(&self, x: &Elem, y: &Elem) -> Result<Elem, SemError> {
        let bad = || mismatch(format!("elements of {self}"), format!("{x:?}, {y:?}"));
        match (self.shape(), x, y) {
            (Shape::Unit, Elem::Star, Elem::Star) => Ok(Elem::Star),
            (Shape::Scalars(s), Elem::Scal(i), Elem::Scal(j)) => Ok(Elem::Scal(s.add(*i, *j))),
            (Shape::Magma(m), Elem::Scal(i), Elem::Scal(j)) => m
                .op
                .get(*i as usize)
                .and_then(|r| r.get(*j as usize))
                .map(|&k| Elem::Scal(k))
                .ok_or_else(bad),
            (Shape::Prod(a, b), Elem::Pair(x1, y1), Elem::Pair(x2, y2)) => {
                Ok(Elem::pair(a.op(x1, x2)?, b.op(y1, y2)?))
            }
            (Shape::Hom(_, b), Elem::Fn(f), Elem::Fn(g)) if f.len() == g.len() => Ok(Elem::Fn(
                f.iter()
                    .zip(g.iter())
                    .map(|(p, q)| b.op(p, q))
                    .collect::<Result<Vec<_>, _>>()?
                    .into(),
            )),
            (Shape::Cp(a, b), _, _) => sumcp(a, b, x, y),
            (Shape::Empty, _, _) => Err(undefined("the operation", self)),
            _ => Err(bad()),
        }
    }

    /// The scalar action `s ⊙ x`.
    pub fn act(&self, s: u16, x: &Elem) -> Result<Elem, SemError> {
        let bad = || mismatch(format!("an element of {self}"), format!("{x:?}"));
        match (self.shape(), x) {
            (Shape::Unit, Elem::Star) => Ok(Elem::Star),
            (Shape::Scalars(m), Elem::Scal(i)) => Ok(Elem::Scal(m.mul(s, *i))),
            (Shape::Magma(m), Elem::Scal(i)) => match &m.act {
                Some(t) => t
                    .get(s as usize)
                    .and_then(|r| r.get(*i as usize))
                    .map(|&k| Elem::Scal(k))
                    .ok_or_else(bad),
                None => Err(undefined("the action", self)),
            },
            (Shape::Prod(a, b), Elem::Pair(p, q)) => Ok(Elem::pair(a.act(s, p)?, b.act(s, q)?)),
            (Shape::Hom(_, b), Elem::Fn(g)) => Ok(Elem::Fn(
                g.iter()
                    .map(|o| b.act(s, o))
                    .collect::<Result<Vec<_>, _>>()?
                    .into(),
            )),
            (Shape::Cp(a, b), _) => prodcp(a, b, s, x),
            (Shape::Empty, _) => Err(undefined("the action", self)),
            _ => Err(bad()),
        }
    }

    pub fn same_shape(&self, other: &SemObject) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.shape(), other.shape()) {
            (Shape::Empty, Shape::Empty) | (Shape::Unit, Shape::Unit) => true,
            (Shape::Scalars(a), Shape::Scalars(b)) => a == b,
            (Shape::Magma(a), Shape::Magma(b)) => a == b,
            (Shape::Prod(a, b), Shape::Prod(c, d))
            | (Shape::Hom(a, b), Shape::Hom(c, d))
            | (Shape::Cp(a, b), Shape::Cp(c, d)) => a.same_shape(c) && b.same_shape(d),
            _ => false,
        }
    }

    /// Printable form of an element of this object.
    pub fn render(&self, e: &Elem) -> String {
        let mut out = String::new();
        self.render_into(e, &mut out);
        out
    }

    fn render_into(&self, e: &Elem, out: &mut String) {
        match (self.shape(), e) {
            (_, Elem::Star) => out.push('*'),
            (Shape::Scalars(s), Elem::Scal(i)) => out.push_str(s.name(*i)),
            (_, Elem::Scal(i)) => out.push_str(&format!("m{i}")),
            (Shape::Prod(a, b), Elem::Pair(x, y)) => {
                out.push('(');
                a.render_into(x, out);
                out.push(',');
                b.render_into(y, out);
                out.push(')');
            }
            (Shape::Hom(a, b), Elem::Fn(g)) => {
                out.push('{');
                let dom = a.carrier(u64::MAX).ok();
                for (i, o) in g.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    match &dom {
                        Some(d) => a.render_into(&d[i], out),
                        None => out.push_str(&i.to_string()),
                    }
                    out.push_str("|->");
                    b.render_into(o, out);
                }
                out.push('}');
            }
            (Shape::Cp(a, _), Elem::L(x)) => {
                out.push_str("L(");
                a.render_into(x, out);
                out.push(')');
            }
            (Shape::Cp(_, b), Elem::R(y)) => {
                out.push_str("R(");
                b.render_into(y, out);
                out.push(')');
            }
            (Shape::Cp(a, b), Elem::B(x, y)) => {
                out.push_str("B(");
                a.render_into(x, out);
                out.push(',');
                b.render_into(y, out);
                out.push(')');
            }
            _ => out.push_str(&format!("{e:?}")),
        }
    }
}

/// `c1 ∔ c2` on `A ⊕ B`.
pub fn sumcp(a: &SemObject, b: &SemObject, c1: &Elem, c2: &Elem) -> Result<Elem, SemError> {
    use Elem::{B, L, R};
    Ok(match (c1, c2) {
        (L(a1), L(a2)) => Elem::l(a.op(a1, a2)?),
        (L(x), R(y)) => Elem::B(x.clone(), y.clone()),
        (L(a1), B(a2, y)) => Elem::B(Arc::new(a.op(a1, a2)?), y.clone()),
        (R(y), L(x)) => Elem::B(x.clone(), y.clone()),
        (R(b1), R(b2)) => Elem::r(b.op(b1, b2)?),
        (R(b1), B(x, b2)) => Elem::B(x.clone(), Arc::new(b.op(b1, b2)?)),
        (B(a1, y), L(a2)) => Elem::B(Arc::new(a.op(a1, a2)?), y.clone()),
        (B(x, b1), R(b2)) => Elem::B(x.clone(), Arc::new(b.op(b1, b2)?)),
        (B(a1, b1), B(a2, b2)) => Elem::b(a.op(a1, a2)?, b.op(b1, b2)?),
        _ => {
            return Err(mismatch(
                "elements of a disjunction object",
                format!("{c1:?}, {c2:?}"),
            ))
        }
    })
}

/// `s ⊙ c` on `A ⊕ B`.
pub fn prodcp(a: &SemObject, b: &SemObject, s: u16, c: &Elem) -> Result<Elem, SemError> {
    Ok(match c {
        Elem::L(x) => Elem::l(a.act(s, x)?),
        Elem::R(y) => Elem::r(b.act(s, y)?),
        Elem::B(x, y) => Elem::b(a.act(s, x)?, b.act(s, y)?),
        _ => return Err(mismatch("an element of a disjunction object", format!("{c:?}"))),
    })
}

impl PartialEq for SemObject {
    fn eq(&self, other: &SemObject) -> bool {
        self.same_shape(other)
    }
}

impl Eq for SemObject {}

impl fmt::Display for SemObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape() {
            Shape::Empty => f.write_str("0"),
            Shape::Unit => f.write_str("1"),
            Shape::Scalars(_) => f.write_str("S"),
            Shape::Magma(m) => write!(f, "M{}", m.len()),
            Shape::Prod(a, b) => write!(f, "({a} x {b})"),
            Shape::Hom(a, b) => write!(f, "[{a}, {b}]"),
            Shape::Cp(a, b) => write!(f, "({a} + {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oo() -> SemObject {
        SemObject::cp(&SemObject::unit(), &SemObject::unit())
    }

    #[test]
    fn cp_carrier_order() {
        let c = oo();
        let car = c.carrier(100).unwrap();
        let shown: Vec<String> = car.iter().map(|e| c.render(e)).collect();
        assert_eq!(shown, ["L(*)", "R(*)", "B(*,*)"]);
        let bt = SemObject::cp(&SemObject::empty(), &SemObject::unit());
        assert_eq!(bt.carrier(100).unwrap().len(), 1);
        let h = SemObject::hom(&SemObject::unit(), &c);
        assert_eq!(h.size(), Some(3));
        for (i, e) in c.carrier(100).unwrap().iter().enumerate() {
            assert_eq!(c.rank(e).unwrap(), i as u64);
        }
    }

    #[test]
    fn ranks_match_carrier() {
        let s = SemObject::scalars(Arc::new(BiMagma::rnd()));
        let objs = [
            SemObject::hom(&oo(), &s),
            SemObject::prod(&s, &oo()),
            SemObject::cp(&s, &SemObject::hom(&s, &SemObject::unit())),
        ];
        for o in objs {
            let car = o.carrier(10_000).unwrap();
            assert_eq!(car.len() as u64, o.size().unwrap());
            for (i, e) in car.iter().enumerate() {
                assert_eq!(o.rank(e).unwrap(), i as u64);
            }
        }
    }

    #[test]
    fn nine_cases() {
        let z = Arc::new(BiMagma::z4());
        let s = SemObject::scalars(z);
        let c = SemObject::cp(&s, &s);
        let sc = Elem::Scal;
        let l = |i| Elem::l(sc(i));
        let r = |i| Elem::r(sc(i));
        let b = |i, j| Elem::b(sc(i), sc(j));
        assert_eq!(c.op(&l(1), &l(2)).unwrap(), l(3));
        assert_eq!(c.op(&l(1), &r(2)).unwrap(), b(1, 2));
        assert_eq!(c.op(&l(1), &b(2, 3)).unwrap(), b(3, 3));
        assert_eq!(c.op(&r(2), &l(1)).unwrap(), b(1, 2));
        assert_eq!(c.op(&r(1), &r(1)).unwrap(), r(2));
        assert_eq!(c.op(&r(1), &b(0, 2)).unwrap(), b(0, 3));
        assert_eq!(c.op(&b(1, 1), &l(1)).unwrap(), b(2, 1));
        assert_eq!(c.op(&b(1, 1), &r(2)).unwrap(), b(1, 3));
        assert_eq!(c.op(&b(1, 2), &b(3, 3)).unwrap(), b(0, 1));
        assert_eq!(c.act(2, &r(1)).unwrap(), r(2));
        assert_eq!(c.act(3, &b(1, 2)).unwrap(), b(3, 2));
        assert_eq!(c.act(2, &l(3)).unwrap(), l(2));
    }

    #[test]
    fn caps() {
        let s = SemObject::scalars(Arc::new(BiMagma::z4()));
        let big = SemObject::hom(&SemObject::cp(&s, &s), &s);
        assert!(matches!(big.carrier(65_536), Err(SemError::SizeCap { .. })));
        let huge = SemObject::hom(&big, &s);
        assert_eq!(huge.size(), None);
    }
}
