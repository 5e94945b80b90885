//! C ABI over `minlab`.
//!
//! Objects are opaque heap handles created by `*_new`/`*_draw` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`MinlabStatus`] and writes its result through an out-pointer; on failure
//! [`minlab_last_error`] describes what went wrong on the calling thread.
//! Variable sets in statements are bitmasks (bit `i` = variable `i`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use minlab::citest::l1_stat;
use minlab::distributions::{ci_holds, tv_distance, JointTable, VariableSet};
use minlab::graphs::{d_separated, enumerate_dags, CiStatement, Dag, HypothesisSpace, VarSet};
use minlab::learner::{Learner, LearnerConfig, OrderSpec};
use minlab::sampling::{draw, Sample};
use minlab::states::classify;
use minlab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    NotMarkov = 4,
    EmptySample = 5,
    Parse = 6,
    Internal = 7,
}

/// Flags describing a (graph, distribution) pair.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinlabStateClass {
    pub markov: bool,
    pub faithful: bool,
    pub minimal: bool,
    pub u_minimal: bool,
    pub quasi_faithful: bool,
}

pub struct MinlabDag(Dag);
pub struct MinlabTable(JointTable);
pub struct MinlabSample(Sample);
pub struct MinlabLearner(Learner);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> MinlabStatus {
    match e {
        Error::CapExceeded { .. } => MinlabStatus::CapExceeded,
        Error::NotMarkov => MinlabStatus::NotMarkov,
        Error::EmptySample => MinlabStatus::EmptySample,
        Error::Json(_) | Error::Csv(_) => MinlabStatus::Parse,
        Error::Io(_) => MinlabStatus::Internal,
        _ => MinlabStatus::InvalidArgument,
    }
}

struct Fail(MinlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MinlabStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(MinlabStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MinlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MinlabStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MinlabStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn array<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn statement(u: u32, v: u32, w: u32, k: usize) -> Result<CiStatement, Fail> {
    let s = CiStatement::new(
        VarSet::from_bits(u),
        VarSet::from_bits(v),
        VarSet::from_bits(w),
    )?;
    if s.min_vars() > k {
        return Err(invalid(format!(
            "statement {s} mentions variables beyond {k}"
        )));
    }
    Ok(s)
}

/// Message for the most recent failing call on this thread; empty after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn minlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn minlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of labelled DAGs on `k` variables.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_dag_count(k: usize, out: *mut usize) -> MinlabStatus {
    guard(|| write(out, enumerate_dags(k)?.len()))
}

/// Number of Markov-equivalence classes on `k` variables.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_class_count(k: usize, out: *mut usize) -> MinlabStatus {
    guard(|| write(out, HypothesisSpace::shared(k)?.classes().len()))
}

/// Builds a DAG from `n_edges` (parent, child) pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * n_edges` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_dag_new(
    k: usize,
    edges: *const usize,
    n_edges: usize,
    out: *mut *mut MinlabDag,
) -> MinlabStatus {
    guard(|| {
        let flat = array(edges, 2 * n_edges, "edges")?;
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let dag = Dag::new(k, &pairs)?;
        write(out, Box::into_raw(Box::new(MinlabDag(dag))))
    })
}

/// # Safety
/// `dag` must come from [`minlab_dag_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn minlab_dag_free(dag: *mut MinlabDag) {
    if !dag.is_null() {
        drop(Box::from_raw(dag));
    }
}

/// Whether `U ⟂ V | W` is entailed by `dag`.
///
/// # Safety
/// `dag` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_d_separated(
    dag: *const MinlabDag,
    u: u32,
    v: u32,
    w: u32,
    out: *mut bool,
) -> MinlabStatus {
    guard(|| {
        let g = &deref(dag, "dag")?.0;
        let s = statement(u, v, w, g.k())?;
        write(out, d_separated(g, &s))
    })
}

/// A joint table over variables with the given cardinalities; `probs` is in
/// mixed-radix order with the last variable varying fastest.
///
/// # Safety
/// `cards` must point to `k` values and `probs` to `n_probs` values; `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_table_new(
    cards: *const usize,
    k: usize,
    probs: *const f64,
    n_probs: usize,
    out: *mut *mut MinlabTable,
) -> MinlabStatus {
    guard(|| {
        let cards = array(cards, k, "cards")?.to_vec();
        let probs = array(probs, n_probs, "probs")?.to_vec();
        let t = JointTable::new(VariableSet::with_cards(cards)?, probs)?;
        write(out, Box::into_raw(Box::new(MinlabTable(t))))
    })
}

/// Parses a table from JSON `{"cards": [...], "probs": [...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_table_from_json(
    json: *const c_char,
    out: *mut *mut MinlabTable,
) -> MinlabStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(MinlabStatus::Parse, "json is not UTF-8".into()))?;
        let t: JointTable = serde_json::from_str(text).map_err(Error::from)?;
        write(out, Box::into_raw(Box::new(MinlabTable(t))))
    })
}

/// Serializes a table to JSON; free the result with [`minlab_string_free`].
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_table_to_json(
    table: *const MinlabTable,
    out: *mut *mut c_char,
) -> MinlabStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let text = serde_json::to_string(t).map_err(Error::from)?;
        let c =
            CString::new(text).map_err(|_| Fail(MinlabStatus::Internal, "nul in JSON".into()))?;
        write(out, c.into_raw())
    })
}

/// # Safety
/// `table` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn minlab_table_free(table: *mut MinlabTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Total variation distance between two tables of the same shape.
///
/// # Safety
/// Both handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_tv_distance(
    a: *const MinlabTable,
    b: *const MinlabTable,
    out: *mut f64,
) -> MinlabStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.0, &deref(b, "b")?.0);
        if !a.same_shape(b) {
            return Err(invalid("tables have different shapes"));
        }
        write(out, tv_distance(a, b))
    })
}

/// The L1 distance of `table` from satisfying `U ⟂ V | W`.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_l1_stat(
    table: *const MinlabTable,
    u: u32,
    v: u32,
    w: u32,
    out: *mut f64,
) -> MinlabStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let s = statement(u, v, w, t.k())?;
        write(out, l1_stat(t, &s))
    })
}

/// Whether `U ⟂ V | W` holds exactly (up to the default tolerance).
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_ci_holds(
    table: *const MinlabTable,
    u: u32,
    v: u32,
    w: u32,
    out: *mut bool,
) -> MinlabStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let s = statement(u, v, w, t.k())?;
        write(out, ci_holds(t, &s))
    })
}

/// Classifies the state `(dag, table)`; all flags are false when the graph is
/// not Markov to the table.
///
/// # Safety
/// Both handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_classify(
    dag: *const MinlabDag,
    table: *const MinlabTable,
    out: *mut MinlabStateClass,
) -> MinlabStatus {
    guard(|| {
        let c = classify(&deref(dag, "dag")?.0, &deref(table, "table")?.0)?;
        write(
            out,
            MinlabStateClass {
                markov: c.markov,
                faithful: c.faithful,
                minimal: c.minimal,
                u_minimal: c.u_minimal,
                quasi_faithful: c.quasi_faithful,
            },
        )
    })
}

/// Draws `n` IID observations from `table` with a fixed seed.
///
/// # Safety
/// `table` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_sample_draw(
    table: *const MinlabTable,
    n: usize,
    seed: u64,
    out: *mut *mut MinlabSample,
) -> MinlabStatus {
    guard(|| {
        let s = draw(&deref(table, "table")?.0, n, seed);
        write(out, Box::into_raw(Box::new(MinlabSample(s))))
    })
}

/// Number of observations in a sample.
///
/// # Safety
/// `sample` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_sample_len(
    sample: *const MinlabSample,
    out: *mut usize,
) -> MinlabStatus {
    guard(|| write(out, deref(sample, "sample")?.0.len()))
}

/// # Safety
/// `sample` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn minlab_sample_free(sample: *mut MinlabSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// A learner over `k` variables. `preferred_class < 0` selects the default
/// hypothesis order; otherwise the order preferring that class id.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_learner_new(
    k: usize,
    preferred_class: i64,
    threshold_constant: f64,
    out: *mut *mut MinlabLearner,
) -> MinlabStatus {
    guard(|| {
        let order = match usize::try_from(preferred_class) {
            Ok(id) => OrderSpec::Prefer(id),
            Err(_) => OrderSpec::Default,
        };
        let l = LearnerConfig {
            k,
            order,
            threshold_constant,
        }
        .build()?;
        write(out, Box::into_raw(Box::new(MinlabLearner(l))))
    })
}

/// Learns a class id from a sample.
///
/// # Safety
/// Both handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn minlab_learner_learn(
    learner: *const MinlabLearner,
    sample: *const MinlabSample,
    class_id: *mut usize,
) -> MinlabStatus {
    guard(|| {
        let h = deref(learner, "learner")?
            .0
            .learn(&deref(sample, "sample")?.0)?;
        write(class_id, h.id)
    })
}

/// # Safety
/// `learner` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn minlab_learner_free(learner: *mut MinlabLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}
