//! C ABI over `edudesire-core`.
//!
//! Every function returns an [`EdStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`ed_last_error`]. Handles are opaque and must be released with their
//! `_free` function. Strings returned to the caller are freed with
//! [`ed_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use edudesire::data::{load_csv, AttributeSchema, Dataset, MissingPolicy};
use edudesire::logit::{fit, FittedLogitModel, ModelSpec};
use edudesire::stats::{chi_square_sf, fisher_exact};
use edudesire::synth::{default_paper_spec, generate};
use edudesire::tree::{build_tree, render_rules, RuleTree, TreeOptions};
use edudesire::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Bad input: unknown attribute or level, malformed JSON, wrong length.
    Validation = 3,
    Io = 4,
    Numerical = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

pub struct EdSchema(AttributeSchema);
pub struct EdDataset(Dataset);
pub struct EdModel(FittedLogitModel);
pub struct EdTree(RuleTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(EdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) => EdStatus::Io,
            Error::Numerical(_) => EdStatus::Numerical,
            _ => EdStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EdStatus::NullArgument, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            EdStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EdStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn new_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(EdStatus::Validation, "string contains a NUL byte".into()))
}

/// Reads a record of `len` level indices (one per schema attribute, the class
/// slot ignored).
unsafe fn record_arg(schema: &AttributeSchema, record: *const usize, len: usize) -> Result<Vec<usize>, Failure> {
    if record.is_null() {
        return Err(null("record"));
    }
    if len != schema.len() {
        return Err(Failure(
            EdStatus::Validation,
            format!("record has {len} entries, schema has {}", schema.len()),
        ));
    }
    let mut r = std::slice::from_raw_parts(record, len).to_vec();
    r[schema.class_index()] = 0;
    schema.check_record(&r)?;
    Ok(r)
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ed_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ed_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Upper tail of the chi-square distribution.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_chi_square_sf(x: f64, df: usize, out: *mut f64) -> EdStatus {
    guard(|| {
        if x.is_nan() || x < 0.0 || df == 0 {
            return Err(Failure(EdStatus::Validation, "need x >= 0 and df >= 1".into()));
        }
        put(out, chi_square_sf(x, df), "out")
    })
}

/// Two-sided Fisher exact test of `[[a, b], [c, d]]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_fisher_exact(a: u64, b: u64, c: u64, d: u64, out: *mut f64) -> EdStatus {
    guard(|| put(out, fisher_exact([[a, b], [c, d]]), "out"))
}

/// The built-in nine-attribute survey schema.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_schema_default(out: *mut *mut EdSchema) -> EdStatus {
    guard(|| {
        let h = Box::into_raw(Box::new(EdSchema(AttributeSchema::youth_survey())));
        put(out, h, "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_schema_from_json(json: *const c_char, out: *mut *mut EdSchema) -> EdStatus {
    guard(|| {
        let schema = AttributeSchema::from_json(str_arg(json, "json")?)?;
        put(out, Box::into_raw(Box::new(EdSchema(schema))), "out")
    })
}

/// # Safety
/// Handles must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_schema_len(schema: *const EdSchema, out: *mut usize) -> EdStatus {
    guard(|| put(out, handle(schema, "schema")?.0.len(), "out"))
}

/// # Safety
/// `schema` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ed_schema_free(schema: *mut EdSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Loads a CSV with a header row; missing cells are an error.
///
/// # Safety
/// Handles and strings must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_dataset_load_csv(
    schema: *const EdSchema,
    path: *const c_char,
    out: *mut *mut EdDataset,
) -> EdStatus {
    guard(|| {
        let schema = &handle(schema, "schema")?.0;
        let path = str_arg(path, "path")?;
        let data = load_csv(Path::new(path), schema, MissingPolicy::Fail)?.dataset;
        put(out, Box::into_raw(Box::new(EdDataset(data))), "out")
    })
}

/// `n` records from the built-in generator.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_dataset_generate_default(seed: u64, n: usize, out: *mut *mut EdDataset) -> EdStatus {
    guard(|| {
        let data = generate(&default_paper_spec(seed, n))?;
        put(out, Box::into_raw(Box::new(EdDataset(data))), "out")
    })
}

/// # Safety
/// Handles must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_dataset_len(data: *const EdDataset, out: *mut usize) -> EdStatus {
    guard(|| put(out, handle(data, "data")?.0.len(), "out"))
}

/// # Safety
/// `data` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ed_dataset_free(data: *mut EdDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Fits a model; `terms` is a comma-separated list such as `"A,B,A*B"`.
///
/// # Safety
/// Handles and strings must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_model_fit(
    data: *const EdDataset,
    terms: *const c_char,
    out: *mut *mut EdModel,
) -> EdStatus {
    guard(|| {
        let data = &handle(data, "data")?.0;
        let spec = ModelSpec::parse(str_arg(terms, "terms")?)?;
        for t in spec.terms() {
            t.check(data.schema())?;
        }
        let model = fit(data, &spec)?;
        put(out, Box::into_raw(Box::new(EdModel(model))), "out")
    })
}

/// # Safety
/// Handles must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_model_deviance(model: *const EdModel, out: *mut f64) -> EdStatus {
    guard(|| put(out, handle(model, "model")?.0.deviance, "out"))
}

/// Writes one probability per class into `probs`, which holds `n_probs` slots.
///
/// # Safety
/// `record` must point to `len` values and `probs` to `n_probs` writable slots.
#[no_mangle]
pub unsafe extern "C" fn ed_model_predict_proba(
    model: *const EdModel,
    record: *const usize,
    len: usize,
    probs: *mut f64,
    n_probs: usize,
) -> EdStatus {
    guard(|| {
        let model = &handle(model, "model")?.0;
        let r = record_arg(model.model.schema(), record, len)?;
        let p = model.predict_proba(&r)?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        if n_probs < p.len() {
            return Err(Failure(
                EdStatus::Validation,
                format!("probability buffer holds {n_probs}, need {}", p.len()),
            ));
        }
        std::slice::from_raw_parts_mut(probs, p.len()).copy_from_slice(&p);
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ed_model_free(model: *mut EdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Builds a tree splitting on the comma-separated `order`. A `max_depth` of 0
/// means no cap.
///
/// # Safety
/// Handles and strings must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_tree_build(
    data: *const EdDataset,
    order: *const c_char,
    min_support: u64,
    max_depth: usize,
    out: *mut *mut EdTree,
) -> EdStatus {
    guard(|| {
        let data = &handle(data, "data")?.0;
        let order: Vec<String> = str_arg(order, "order")?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        let opts = TreeOptions {
            min_support,
            max_depth: (max_depth > 0).then_some(max_depth),
        };
        let tree = build_tree(data, &order, opts)?;
        put(out, Box::into_raw(Box::new(EdTree(tree))), "out")
    })
}

/// Routes a record; writes the class index, rule number and backoff flag.
///
/// # Safety
/// `record` must point to `len` values; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_tree_classify(
    tree: *const EdTree,
    record: *const usize,
    len: usize,
    class_out: *mut usize,
    rule_out: *mut usize,
    backoff_out: *mut bool,
) -> EdStatus {
    guard(|| {
        let tree = &handle(tree, "tree")?.0;
        let r = record_arg(tree.schema(), record, len)?;
        let m = tree.classify_rule(&r)?;
        put(class_out, m.class, "class_out")?;
        put(rule_out, m.rule.number, "rule_out")?;
        put(backoff_out, m.rule.backoff, "backoff_out")
    })
}

/// The rule set as text; free the result with [`ed_string_free`].
///
/// # Safety
/// Handles must be valid; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ed_tree_rules_text(tree: *const EdTree, include_backoff: bool, out: *mut *mut c_char) -> EdStatus {
    guard(|| {
        let tree = &handle(tree, "tree")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let texts: Vec<_> = tree.extract_rules(include_backoff).iter().map(|r| r.text()).collect();
        put(out, new_string(render_rules(&texts))?, "out")
    })
}

/// # Safety
/// `tree` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ed_tree_free(tree: *mut EdTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}
