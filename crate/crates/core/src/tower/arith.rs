use super::interval::EXP_ARG_LIMIT;
use super::{is_exact_one, is_zero_interval, small_exponent, Cmp, Dyadic, Interval, Round, TowerError, TowerReal};

type Res<T> = Result<T, TowerError>;

/// Height-1 mantissas up to this size are expanded into plain intervals.
const FLATTEN_MAX: i64 = 1 << 20;

/// Signed real used for intermediate logarithms.
#[derive(Clone, Debug)]
pub(crate) enum Real {
    Flat(Interval),
    Pos(TowerReal),
    Neg(TowerReal),
}

impl Real {
    pub(crate) fn from_tower(t: TowerReal, negative: bool) -> Real {
        match (t.flatten(), negative) {
            (Some(i), false) => Real::Flat(i),
            (Some(i), true) => Real::Flat(i.neg()),
            (None, false) => Real::Pos(t),
            (None, true) => Real::Neg(t),
        }
    }

    pub(crate) fn neg(self) -> Real {
        match self {
            Real::Flat(i) => Real::Flat(i.neg()),
            Real::Pos(t) => Real::Neg(t),
            Real::Neg(t) => Real::Pos(t),
        }
    }

    pub(crate) fn into_positive(self, prec: u32) -> Res<TowerReal> {
        match self {
            Real::Flat(i) if i.is_positive() => Ok(TowerReal::flat(i, prec)),
            Real::Flat(i) if i.hi.is_positive() => Err(TowerError::Undecided),
            Real::Flat(_) | Real::Neg(_) => Err(TowerError::DomainError),
            Real::Pos(t) => Ok(t),
        }
    }
}

fn flat(i: Interval, prec: u32) -> TowerReal {
    TowerReal::flat(i, prec)
}

fn dy(v: i64) -> Dyadic {
    Dyadic::from_int(v)
}

/// k with `exp^height(man.lo) >= 2^k`, for height >= 1.
fn base_log2_lower(height: u32, man: &Interval, prec: u32) -> i64 {
    let cap = dy(1 << 30);
    let mut v = man.lo.clone();
    for _ in 1..height {
        if v > dy(32) {
            v = cap.clone();
            break;
        }
        v = if v < dy(-64) { Dyadic::zero() } else { Interval::point(v).exp(prec).lo };
    }
    let f = v.min(cap).to_f64();
    // exp(x) >= 2^(1.44 x) for x >= 0 and exp(x) >= 2^(2x) for x < 0.
    if f >= 0.0 {
        (1.44 * f - 1.0).floor() as i64
    } else {
        (2.0 * f - 1.0).floor() as i64
    }
}

impl TowerReal {
    /// Plain interval enclosure when the value is of moderate size.
    pub(crate) fn flatten(&self) -> Option<Interval> {
        if self.is_flat() {
            return Some(self.man.clone());
        }
        if self.height != 1 || self.man.hi > dy(FLATTEN_MAX) || self.man.lo < dy(-EXP_ARG_LIMIT) {
            return None;
        }
        Some(if self.recip { self.man.neg().exp(self.prec) } else { self.man.exp(self.prec) })
    }

    /// Dyadic upper bound on a reciprocal value.
    fn tiny_upper(&self) -> Dyadic {
        debug_assert!(self.recip);
        Dyadic::pow2(-base_log2_lower(self.height, &self.man, self.prec))
    }

    fn base(&self) -> TowerReal {
        TowerReal::raw(false, self.height, self.man.clone(), self.prec)
    }

    pub(crate) fn ln_r(&self) -> Real {
        if self.recip {
            return self.base().ln_r().neg();
        }
        match self.height {
            0 => Real::Flat(self.man.ln(self.prec)),
            1 => Real::Flat(self.man.clone()),
            h => Real::from_tower(TowerReal::raw(false, h - 1, self.man.clone(), self.prec).normalize(), false),
        }
    }

    pub fn recip(&self) -> TowerReal {
        if self.is_flat() {
            return flat(self.man.recip(self.prec), self.prec);
        }
        TowerReal::raw(!self.recip, self.height, self.man.clone(), self.prec).normalize()
    }

    pub fn mul(&self, o: &TowerReal) -> Res<TowerReal> {
        let prec = self.prec.max(o.prec);
        if self.is_flat() && o.is_flat() {
            return Ok(flat(self.man.mul(&o.man, prec), prec));
        }
        if is_exact_one(o) {
            return Ok(self.with_prec_at_least(prec));
        }
        if is_exact_one(self) {
            return Ok(o.with_prec_at_least(prec));
        }
        for (x, f) in [(self, o), (o, self)] {
            if f.is_flat() {
                if let Some(r) = scale_near_one(&x.with_prec_at_least(prec), &f.man) {
                    return Ok(r);
                }
            }
        }
        if let (Some(a), Some(b)) = (self.flatten(), o.flatten()) {
            return Ok(flat(a.mul(&b, prec), prec));
        }
        let s = add_real(&self.ln_r(), &o.ln_r(), prec)?;
        exp_real(&s, prec)
    }

    pub fn div(&self, o: &TowerReal) -> Res<TowerReal> {
        self.mul(&o.recip())
    }

    pub fn add(&self, o: &TowerReal) -> Res<TowerReal> {
        add_pos(self, o)
    }

    /// Difference of two positive values; fails unless `self > o` is certified.
    pub fn sub(&self, o: &TowerReal) -> Res<TowerReal> {
        match self.compare(o) {
            Cmp::Greater => sub_pos(self, o),
            Cmp::Undecided => Err(TowerError::Undecided),
            _ => Err(TowerError::NonPositiveInput),
        }
    }

    pub fn exp(&self) -> Res<TowerReal> {
        exp_real(&Real::from_tower(self.clone(), false), self.prec)
    }

    /// `exp(-self)`.
    pub fn exp_neg(&self) -> Res<TowerReal> {
        Ok(self.exp()?.recip())
    }

    /// `ln(self)` for a value certified above one.
    pub fn ln(&self) -> Res<TowerReal> {
        self.ln_r().into_positive(self.prec)
    }

    /// `-ln(self)` for a value certified below one.
    pub fn neg_ln(&self) -> Res<TowerReal> {
        self.ln_r().neg().into_positive(self.prec)
    }

    pub fn pow(&self, e: &TowerReal) -> Res<TowerReal> {
        let prec = self.prec.max(e.prec);
        if is_exact_one(self) {
            return Ok(TowerReal::one(prec));
        }
        if self.is_flat() {
            if let Some(k) = small_exponent(e) {
                return Ok(flat(self.man.powi_nonneg(k, prec), prec));
            }
        }
        let p = mul_real(&Real::from_tower(e.clone(), false), &self.ln_r(), prec)?;
        exp_real(&p, prec)
    }

    pub fn powi(&self, k: u64) -> Res<TowerReal> {
        self.pow(&TowerReal::from_bigint(&k.max(1).into(), self.prec)?)
            .map(|r| if k == 0 { TowerReal::one(self.prec) } else { r })
    }

    pub fn sqrt(&self) -> Res<TowerReal> {
        if self.is_flat() {
            return Ok(flat(self.man.sqrt(self.prec), self.prec));
        }
        let half = Real::Flat(Interval::point(Dyadic::pow2(-1)));
        exp_real(&mul_real(&half, &self.ln_r(), self.prec)?, self.prec)
    }

    /// Smallest enclosure containing both values.
    pub fn hull(&self, o: &TowerReal) -> Res<TowerReal> {
        hull_t(self, o)
    }

    pub fn compare(&self, o: &TowerReal) -> Cmp {
        compare(self, o)
    }

    fn with_prec_at_least(&self, prec: u32) -> TowerReal {
        TowerReal { prec: self.prec.max(prec), ..self.clone() }
    }
}

/// `x * f` for a factor interval within [1/2, 3/2], by shifting the top mantissa.
fn scale_near_one(x: &TowerReal, f: &Interval) -> Option<TowerReal> {
    let prec = x.prec;
    let half = Dyadic::pow2(-1);
    let three_halves = dy(3).mul_pow2(-1);
    if f.lo < half || f.hi > three_halves {
        return None;
    }
    if x.is_flat() {
        return Some(flat(x.man.mul(f, prec), prec));
    }
    let one = Dyadic::one();
    let a = one.sub(&f.lo, prec, Round::Up).max(Dyadic::zero());
    let b = f.hi.sub(&one, prec, Round::Up).max(Dyadic::zero());
    let man = if x.recip {
        // x f = 1 / (base / f) and 1/f lies in [1 - b, 1 + 2a].
        shift_mantissa(x.height, &x.man, &b, &a.mul_pow2(1), prec)?
    } else {
        shift_mantissa(x.height, &x.man, &a, &b, prec)?
    };
    Some(TowerReal::raw(x.recip, x.height, man, prec).normalize())
}

/// Mantissa enclosing `exp^h(man) * [1 - a, 1 + b]` with `a <= 1/2`, `h >= 1`.
fn shift_mantissa(h: u32, man: &Interval, a: &Dyadic, b: &Dyadic, prec: u32) -> Option<Interval> {
    if *a > Dyadic::pow2(-1) {
        return None;
    }
    if h == 1 {
        let down = Interval::point(a.neg()).ln1p(prec).lo;
        let up = Interval::point(b.clone()).ln1p(prec).hi;
        return Some(Interval::new(man.lo.add(&down, prec, Round::Down), man.hi.add(&up, prec, Round::Up)));
    }
    if man.lo < Dyadic::one() {
        return None;
    }
    // A shift s at level h-1 moves level 0 by at most 2 s exp(-m) once every level is >= e.
    let s = a.mul_pow2(1).max(b.clone());
    let t = man.lo.clone().min(dy(FLATTEN_MAX));
    let damp = Interval::point(t.neg()).exp(prec).hi;
    let delta = s.mul(&damp, prec, Round::Up).mul_pow2(1);
    Some(Interval::new(man.lo.sub(&delta, prec, Round::Down), man.hi.add(&delta, prec, Round::Up)))
}

pub(crate) fn exp_real(r: &Real, prec: u32) -> Res<TowerReal> {
    match r {
        Real::Flat(i) => {
            if i.hi < dy(-44) {
                Ok(TowerReal::raw(true, 1, i.neg(), prec).normalize())
            } else {
                Ok(TowerReal::raw(false, 1, i.clone(), prec).normalize())
            }
        }
        Real::Pos(t) if !t.recip => Ok(TowerReal::raw(false, t.height + 1, t.man.clone(), prec).normalize()),
        Real::Neg(t) if !t.recip => Ok(TowerReal::raw(true, t.height + 1, t.man.clone(), prec).normalize()),
        Real::Pos(t) => {
            // exp(u) <= 1 + 2u for 0 < u <= 1.
            let u = t.tiny_upper();
            if u > Dyadic::one() {
                return Err(TowerError::Unrepresentable);
            }
            let hi = Dyadic::one().add(&u.mul_pow2(1), prec, Round::Up);
            Ok(flat(Interval::new(Dyadic::one(), hi), prec))
        }
        Real::Neg(t) => {
            let u = t.tiny_upper();
            if u >= Dyadic::one() {
                return Err(TowerError::Unrepresentable);
            }
            let lo = Dyadic::one().sub(&u, prec, Round::Down);
            Ok(flat(Interval::new(lo, Dyadic::one()), prec))
        }
    }
}

fn add_pos(x: &TowerReal, y: &TowerReal) -> Res<TowerReal> {
    let prec = x.prec.max(y.prec);
    let (fx, fy) = (x.flatten(), y.flatten());
    if let (Some(a), Some(b)) = (&fx, &fy) {
        return Ok(flat(a.add(b, prec), prec));
    }
    for (f, t) in [(&fx, y), (&fy, x)] {
        if let (Some(a), true) = (f, t.recip) {
            let hi = a.hi.add(&t.tiny_upper(), prec, Round::Up);
            return Ok(flat(Interval::new(a.lo.clone(), hi), prec));
        }
    }
    let (big, small) = if compare(x, y) == Cmp::Less { (y, x) } else { (x, y) };
    let r = small.div(big)?;
    let factor = match r.flatten() {
        Some(ri) => Interval::one().add(&ri, prec),
        None if r.recip => Interval::new(Dyadic::one(), Dyadic::one().add(&r.tiny_upper(), prec, Round::Up)),
        None => return Err(TowerError::Undecided),
    };
    big.mul(&flat(factor, prec))
}

/// `x - y` for a certified `x > y`.
fn sub_pos(x: &TowerReal, y: &TowerReal) -> Res<TowerReal> {
    let prec = x.prec.max(y.prec);
    let (fx, fy) = (x.flatten(), y.flatten());
    if let (Some(a), Some(b)) = (&fx, &fy) {
        let d = a.sub(b, prec);
        if !d.is_positive() {
            return Err(TowerError::Undecided);
        }
        return Ok(flat(d, prec));
    }
    if let (Some(a), true) = (&fx, y.recip) {
        let lo = a.lo.sub(&y.tiny_upper(), prec, Round::Down);
        if !lo.is_positive() {
            return Err(TowerError::Undecided);
        }
        return Ok(flat(Interval::new(lo, a.hi.clone()), prec));
    }
    let r = y.div(x)?;
    let factor = match r.flatten() {
        Some(ri) => Interval::one().sub(&ri, prec),
        None if r.recip => {
            let u = r.tiny_upper();
            if u > Dyadic::pow2(-1) {
                return Err(TowerError::Undecided);
            }
            if let Some(t) = scale_near_one_exact(x, &u) {
                return Ok(t);
            }
            Interval::new(Dyadic::one().sub(&u, prec, Round::Down), Dyadic::one())
        }
        None => return Err(TowerError::Undecided),
    };
    if !factor.is_positive() {
        return Err(TowerError::Undecided);
    }
    x.mul(&flat(factor, prec))
}

/// `x * [1 - u, 1]` without first rounding `1 - u`.
fn scale_near_one_exact(x: &TowerReal, u: &Dyadic) -> Option<TowerReal> {
    if x.is_flat() {
        return None;
    }
    let z = Dyadic::zero();
    let man = if x.recip {
        shift_mantissa(x.height, &x.man, &z, &u.mul_pow2(1), x.prec)?
    } else {
        shift_mantissa(x.height, &x.man, u, &z, x.prec)?
    };
    Some(TowerReal::raw(x.recip, x.height, man, x.prec).normalize())
}

/// `x - y` as a signed value.
fn pos_minus(x: &TowerReal, y: &TowerReal) -> Res<Real> {
    let prec = x.prec.max(y.prec);
    if let (Some(a), Some(b)) = (x.flatten(), y.flatten()) {
        return Ok(Real::Flat(a.sub(&b, prec)));
    }
    match compare(x, y) {
        Cmp::Greater => Ok(Real::from_tower(sub_pos(x, y)?, false)),
        Cmp::Less => Ok(Real::from_tower(sub_pos(y, x)?, true)),
        Cmp::Equal => Ok(Real::Flat(Interval::zero())),
        Cmp::Undecided if x.recip && y.recip => Ok(Real::Flat(Interval::new(y.tiny_upper().neg(), x.tiny_upper()))),
        Cmp::Undecided => Err(TowerError::Undecided),
    }
}

/// `f + t` for a plain interval `f` and positive tower `t`.
fn flat_plus_pos(f: &Interval, t: &TowerReal) -> Res<Real> {
    let prec = t.prec;
    if let Some(ti) = t.flatten() {
        return Ok(Real::Flat(f.add(&ti, prec)));
    }
    if is_zero_interval(f) {
        return Ok(Real::Pos(t.clone()));
    }
    if t.recip {
        let hi = f.hi.add(&t.tiny_upper(), prec, Round::Up);
        return Ok(Real::Flat(Interval::new(f.lo.clone(), hi)));
    }
    if f.is_positive() {
        return Ok(Real::from_tower(add_pos(&flat(f.clone(), prec), t)?, false));
    }
    if f.is_negative() {
        return pos_minus(t, &flat(f.neg(), prec));
    }
    let lo = if f.lo.is_negative() {
        pos_minus(t, &flat(Interval::point(f.lo.neg()), prec))?
    } else {
        Real::Pos(t.clone())
    };
    let hi = if f.hi.is_positive() {
        Real::from_tower(add_pos(t, &flat(Interval::point(f.hi.clone()), prec))?, false)
    } else {
        Real::Pos(t.clone())
    };
    hull_real(&lo, &hi, prec)
}

pub(crate) fn add_real(a: &Real, b: &Real, prec: u32) -> Res<Real> {
    match (a, b) {
        (Real::Flat(x), Real::Flat(y)) => Ok(Real::Flat(x.add(y, prec))),
        (Real::Flat(f), Real::Pos(t)) | (Real::Pos(t), Real::Flat(f)) => flat_plus_pos(f, t),
        (Real::Flat(f), Real::Neg(t)) | (Real::Neg(t), Real::Flat(f)) => Ok(flat_plus_pos(&f.neg(), t)?.neg()),
        (Real::Pos(x), Real::Pos(y)) => Ok(Real::from_tower(add_pos(x, y)?, false)),
        (Real::Neg(x), Real::Neg(y)) => Ok(Real::from_tower(add_pos(x, y)?, true)),
        (Real::Pos(x), Real::Neg(y)) | (Real::Neg(y), Real::Pos(x)) => pos_minus(x, y),
    }
}

fn sign_mag(r: &Real, prec: u32) -> Res<Option<(bool, TowerReal)>> {
    match r {
        Real::Flat(i) if is_zero_interval(i) => Ok(None),
        Real::Flat(i) if i.is_positive() => Ok(Some((false, flat(i.clone(), prec)))),
        Real::Flat(i) if i.is_negative() => Ok(Some((true, flat(i.neg(), prec)))),
        Real::Flat(_) => Err(TowerError::Undecided),
        Real::Pos(t) => Ok(Some((false, t.clone()))),
        Real::Neg(t) => Ok(Some((true, t.clone()))),
    }
}

pub(crate) fn mul_real(a: &Real, b: &Real, prec: u32) -> Res<Real> {
    if let (Real::Flat(x), Real::Flat(y)) = (a, b) {
        return Ok(Real::Flat(x.mul(y, prec)));
    }
    let (Some((sa, ma)), Some((sb, mb))) = (sign_mag(a, prec)?, sign_mag(b, prec)?) else {
        return Ok(Real::Flat(Interval::zero()));
    };
    Ok(Real::from_tower(ma.mul(&mb)?, sa != sb))
}

fn hull_real(a: &Real, b: &Real, prec: u32) -> Res<Real> {
    let as_pos = |r: &Real| match r {
        Real::Pos(t) => Some(t.clone()),
        Real::Flat(i) if i.is_positive() => Some(flat(i.clone(), prec)),
        _ => None,
    };
    if let (Real::Flat(x), Real::Flat(y)) = (a, b) {
        return Ok(Real::Flat(x.hull(y)));
    }
    if let (Some(x), Some(y)) = (as_pos(a), as_pos(b)) {
        return Ok(Real::from_tower(hull_t(&x, &y)?, false));
    }
    let (na, nb) = (a.clone().neg(), b.clone().neg());
    if let (Some(x), Some(y)) = (as_pos(&na), as_pos(&nb)) {
        return Ok(Real::from_tower(hull_t(&x, &y)?, true));
    }
    Err(TowerError::Unrepresentable)
}

/// Re-expresses a non-reciprocal mantissa one level higher.
fn lift_once(man: &Interval, prec: u32) -> Res<Interval> {
    if !man.is_positive() {
        return Err(TowerError::Unrepresentable);
    }
    Ok(man.ln(prec))
}

fn hull_t(x: &TowerReal, y: &TowerReal) -> Res<TowerReal> {
    let prec = x.prec.max(y.prec);
    if x.recip != y.recip {
        return match (x.flatten(), y.flatten()) {
            (Some(a), Some(b)) => Ok(flat(a.hull(&b), prec)),
            _ => Err(TowerError::Unrepresentable),
        };
    }
    let (mut lo_t, hi_t) = if x.height <= y.height { (x.clone(), y) } else { (y.clone(), x) };
    while lo_t.height < hi_t.height {
        lo_t.man = lift_once(&lo_t.man, prec)?;
        lo_t.height += 1;
    }
    Ok(TowerReal::raw(x.recip, hi_t.height, lo_t.man.hull(&hi_t.man), prec).normalize())
}

fn cmp_interval(x: &Interval, y: &Interval) -> Cmp {
    if x.hi < y.lo {
        Cmp::Less
    } else if x.lo > y.hi {
        Cmp::Greater
    } else if x.is_point() && y.is_point() && x.lo == y.lo {
        Cmp::Equal
    } else {
        Cmp::Undecided
    }
}

fn compare(x: &TowerReal, y: &TowerReal) -> Cmp {
    if x.recip == y.recip && x.height == y.height && x.man.is_point() && x.man == y.man {
        return Cmp::Equal;
    }
    match (x.recip, y.recip) {
        (false, false) => cmp_plain(x, y),
        (true, true) => cmp_plain(&x.base(), &y.base()).reverse(),
        (false, true) => cmp_mixed(x, y),
        (true, false) => cmp_mixed(y, x).reverse(),
    }
}

/// `x` plain, `y` reciprocal.
fn cmp_mixed(x: &TowerReal, y: &TowerReal) -> Cmp {
    let x_at_least_one = if x.height == 0 { x.man.lo >= Dyadic::one() } else { !x.man.lo.is_negative() };
    let base_above_one = y.height >= 1 && y.man.lo.is_positive();
    if x_at_least_one && base_above_one {
        return Cmp::Greater;
    }
    compare_real(&x.ln_r(), &y.ln_r())
}

fn cmp_plain(x: &TowerReal, y: &TowerReal) -> Cmp {
    if x.height < y.height {
        return cmp_plain(y, x).reverse();
    }
    let prec = x.prec.max(y.prec);
    // Lift y to x's height; `None` stands for minus infinity.
    let mut lo = Some(y.man.lo.clone());
    let mut hi = y.man.hi.clone();
    for _ in y.height..x.height {
        if !hi.is_positive() {
            return Cmp::Greater;
        }
        hi = Interval::point(hi).ln(prec).hi;
        lo = match lo {
            Some(l) if l.is_positive() => Some(Interval::point(l).ln(prec).lo),
            _ => None,
        };
    }
    if x.man.lo > hi {
        return Cmp::Greater;
    }
    match lo {
        Some(l) if x.man.hi < l => Cmp::Less,
        Some(l) if x.height == y.height => cmp_interval(&x.man, &Interval::new(l, hi)),
        _ => Cmp::Undecided,
    }
}

fn flat_vs_pos(f: &Interval, t: &TowerReal) -> Cmp {
    if let Some(ti) = t.flatten() {
        return cmp_interval(f, &ti);
    }
    if !f.hi.is_positive() {
        return Cmp::Less;
    }
    let prec = t.prec;
    if compare(&flat(Interval::point(f.hi.clone()), prec), t) == Cmp::Less {
        return Cmp::Less;
    }
    if f.lo.is_positive() && compare(&flat(Interval::point(f.lo.clone()), prec), t) == Cmp::Greater {
        return Cmp::Greater;
    }
    Cmp::Undecided
}

pub(crate) fn compare_real(a: &Real, b: &Real) -> Cmp {
    match (a, b) {
        (Real::Flat(x), Real::Flat(y)) => cmp_interval(x, y),
        (Real::Pos(x), Real::Pos(y)) => compare(x, y),
        (Real::Neg(x), Real::Neg(y)) => compare(y, x),
        (Real::Pos(_), Real::Neg(_)) => Cmp::Greater,
        (Real::Neg(_), Real::Pos(_)) => Cmp::Less,
        (Real::Flat(f), Real::Pos(t)) => flat_vs_pos(f, t),
        (Real::Pos(t), Real::Flat(f)) => flat_vs_pos(f, t).reverse(),
        (Real::Flat(f), Real::Neg(t)) => flat_vs_pos(&f.neg(), t).reverse(),
        (Real::Neg(t), Real::Flat(f)) => flat_vs_pos(&f.neg(), t),
    }
}
