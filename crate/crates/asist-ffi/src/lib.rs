//! C ABI over the asist toolkit.
//!
//! Conventions: every fallible call returns an `AsistStatus`; on failure a
//! thread-local message is retrievable via `asist_last_error_message` until
//! the next call on the same thread. Handles returned through out-pointers are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use asist_core::annosim::{center_crop, simulate_video, SimParams};
use asist_core::error::Error;
use asist_core::io::{colorize, embedding, masks, report};
use asist_core::meanshift::{mean_shift, segment_and_track, Clustering, MeanShiftParams};
use asist_core::metrics::{evaluate, AogmWeights};
use asist_core::model::LabelVideo;
use asist_core::oracle::{embed_labels, OracleParams};

/// Result codes; mirrors the CLI exit-code contract.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsistStatus {
    Ok = 0,
    InvalidInput = 2,
    FormatError = 3,
    IncompatibleInputs = 4,
    NullPointer = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AsistStatus {
    match err {
        Error::InvalidInput(_) => AsistStatus::InvalidInput,
        Error::Format(_) | Error::Io(_) => AsistStatus::FormatError,
        Error::Incompatible(_) => AsistStatus::IncompatibleInputs,
    }
}

fn fail(err: Error) -> AsistStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn null_arg(name: &str) -> AsistStatus {
    set_error(format!("null pointer argument: {name}"));
    AsistStatus::NullPointer
}

unsafe fn path_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a Path, AsistStatus> {
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Path::new(s)),
        Err(_) => {
            set_error(format!("argument {name} is not valid UTF-8"));
            Err(AsistStatus::InvalidInput)
        }
    }
}

/// Message of the most recent failure on this thread, or NULL. The pointer is
/// valid until the next asist call on the same thread.
#[no_mangle]
pub extern "C" fn asist_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn asist_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Cap the worker pool from the ASIST_THREADS environment variable. Optional;
/// the pool is otherwise sized to the hardware. Results do not depend on it.
#[no_mangle]
pub extern "C" fn asist_init_threads() {
    asist_core::init_thread_pool();
}

/// Simulation parameters (see asist_sim_params_default for the defaults).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AsistSimParams {
    pub n_objects: u32,
    pub canvas_size: u32,
    pub out_size: u32,
    pub n_frames: u32,
    pub min_length: f64,
    pub max_length: f64,
    pub min_width: f64,
    pub max_width: f64,
    pub move_prob: f64,
    pub rotate_prob: f64,
    pub resize_prob: f64,
    pub seed: u64,
}

#[no_mangle]
pub extern "C" fn asist_sim_params_default() -> AsistSimParams {
    let d = SimParams::default();
    AsistSimParams {
        n_objects: d.n_objects,
        canvas_size: d.canvas_size,
        out_size: d.out_size,
        n_frames: d.n_frames,
        min_length: d.min_length,
        max_length: d.max_length,
        min_width: d.min_width,
        max_width: d.max_width,
        move_prob: d.move_prob,
        rotate_prob: d.rotate_prob,
        resize_prob: d.resize_prob,
        seed: d.seed,
    }
}

impl From<&AsistSimParams> for SimParams {
    fn from(p: &AsistSimParams) -> SimParams {
        SimParams {
            n_objects: p.n_objects,
            canvas_size: p.canvas_size,
            out_size: p.out_size,
            n_frames: p.n_frames,
            min_length: p.min_length,
            max_length: p.max_length,
            min_width: p.min_width,
            max_width: p.max_width,
            move_prob: p.move_prob,
            rotate_prob: p.rotate_prob,
            resize_prob: p.resize_prob,
            seed: p.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AsistOracleParams {
    pub dim: u32,
    pub noise_sigma: f64,
    pub seed: u64,
}

#[no_mangle]
pub extern "C" fn asist_oracle_params_default() -> AsistOracleParams {
    let d = OracleParams::default();
    AsistOracleParams {
        dim: d.dim,
        noise_sigma: d.noise_sigma,
        seed: d.seed,
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AsistMeanShiftParams {
    pub bandwidth: f64,
    pub seed_fraction: f64,
    pub max_iters: u32,
    pub convergence_tol: f64,
    pub merge_tol: f64,
    pub fg_norm_threshold: f64,
    pub min_cluster_pixels: usize,
    pub assoc_threshold: f64,
    pub seed: u64,
}

#[no_mangle]
pub extern "C" fn asist_mean_shift_params_default() -> AsistMeanShiftParams {
    let d = MeanShiftParams::default();
    AsistMeanShiftParams {
        bandwidth: d.bandwidth,
        seed_fraction: d.seed_fraction,
        max_iters: d.max_iters,
        convergence_tol: d.convergence_tol,
        merge_tol: d.merge_tol,
        fg_norm_threshold: d.fg_norm_threshold,
        min_cluster_pixels: d.min_cluster_pixels,
        assoc_threshold: d.assoc_threshold,
        seed: d.seed,
    }
}

impl From<&AsistMeanShiftParams> for MeanShiftParams {
    fn from(p: &AsistMeanShiftParams) -> MeanShiftParams {
        MeanShiftParams {
            bandwidth: p.bandwidth,
            seed_fraction: p.seed_fraction,
            max_iters: p.max_iters,
            convergence_tol: p.convergence_tol,
            merge_tol: p.merge_tol,
            fg_norm_threshold: p.fg_norm_threshold,
            min_cluster_pixels: p.min_cluster_pixels,
            assoc_threshold: p.assoc_threshold,
            seed: p.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AsistAogmWeights {
    pub w_ns: f64,
    pub w_fn: f64,
    pub w_fp: f64,
    pub w_ed: f64,
    pub w_ea: f64,
    pub w_ec: f64,
}

#[no_mangle]
pub extern "C" fn asist_aogm_weights_default() -> AsistAogmWeights {
    let d = AogmWeights::default();
    AsistAogmWeights {
        w_ns: d.w_ns,
        w_fn: d.w_fn,
        w_fp: d.w_fp,
        w_ed: d.w_ed,
        w_ea: d.w_ea,
        w_ec: d.w_ec,
    }
}

/// DET/SEG/TRA triple filled by asist_evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AsistScores {
    pub det: f64,
    pub seg: f64,
    pub tra: f64,
}

/// Simulate one cropped annotation video and write it as a mask directory.
///
/// # Safety
/// `params` and `out_dir` must be valid pointers; `out_dir` a NUL-terminated
/// UTF-8 path.
#[no_mangle]
pub unsafe extern "C" fn asist_simulate(
    params: *const AsistSimParams,
    out_dir: *const c_char,
) -> AsistStatus {
    if params.is_null() {
        return null_arg("params");
    }
    let out = match path_arg(out_dir, "out_dir") {
        Ok(p) => p,
        Err(s) => return s,
    };
    let p: SimParams = (&*params).into();
    let result = simulate_video(&p)
        .and_then(|full| center_crop(&full, p.out_size))
        .and_then(|video| masks::write_label_video(&video, out));
    match result {
        Ok(()) => AsistStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Embed a label-video directory into an ASEMB file.
///
/// # Safety
/// `label_dir`, `params`, and `out_file` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn asist_embed(
    label_dir: *const c_char,
    params: *const AsistOracleParams,
    out_file: *const c_char,
) -> AsistStatus {
    if params.is_null() {
        return null_arg("params");
    }
    let (dir, out) = match (path_arg(label_dir, "label_dir"), path_arg(out_file, "out_file")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let p = &*params;
    let oracle = OracleParams {
        dim: p.dim,
        noise_sigma: p.noise_sigma,
        seed: p.seed,
    };
    let result = masks::read_label_video(dir)
        .and_then(|video| embed_labels(&video, &oracle))
        .and_then(|emb| embedding::write_embedding(&emb, out, embedding::DEFAULT_SIZE_LIMIT));
    match result {
        Ok(()) => AsistStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Segment and track an ASEMB file into a mask directory.
///
/// # Safety
/// `embedding_file`, `params`, and `out_dir` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn asist_track(
    embedding_file: *const c_char,
    params: *const AsistMeanShiftParams,
    out_dir: *const c_char,
) -> AsistStatus {
    if params.is_null() {
        return null_arg("params");
    }
    let (input, out) = match (
        path_arg(embedding_file, "embedding_file"),
        path_arg(out_dir, "out_dir"),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let p: MeanShiftParams = (&*params).into();
    let result = embedding::read_embedding(input)
        .and_then(|emb| segment_and_track(&emb, &p))
        .and_then(|video| masks::write_label_video(&video, out));
    match result {
        Ok(()) => AsistStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Evaluate a computed mask directory against a reference. Writes a JSON
/// report when `report_file` is non-NULL and fills `scores` when non-NULL.
///
/// # Safety
/// `ref_dir`, `res_dir`, and `weights` must be valid pointers; `report_file`
/// and `scores` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn asist_evaluate(
    ref_dir: *const c_char,
    res_dir: *const c_char,
    weights: *const AsistAogmWeights,
    report_file: *const c_char,
    scores: *mut AsistScores,
) -> AsistStatus {
    if weights.is_null() {
        return null_arg("weights");
    }
    let (rdir, cdir) = match (path_arg(ref_dir, "ref_dir"), path_arg(res_dir, "res_dir")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let w = &*weights;
    let w = AogmWeights {
        w_ns: w.w_ns,
        w_fn: w.w_fn,
        w_fp: w.w_fp,
        w_ed: w.w_ed,
        w_ea: w.w_ea,
        w_ec: w.w_ec,
    };
    let result = (|| {
        let reference = masks::read_label_video(rdir)?;
        let computed = masks::read_label_video(cdir)?;
        let metrics = evaluate(&reference, &computed, &w)?;
        if !report_file.is_null() {
            if let Ok(path) = CStr::from_ptr(report_file).to_str() {
                report::write_report(&report::ReportFile::new(&metrics, &w), Path::new(path))?;
            }
        }
        Ok(metrics)
    })();
    match result {
        Ok(metrics) => {
            if !scores.is_null() {
                *scores = AsistScores {
                    det: metrics.det,
                    seg: metrics.seg,
                    tra: metrics.tra,
                };
            }
            AsistStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Render a mask directory as RGB PNGs.
///
/// # Safety
/// `label_dir` and `out_dir` must be valid NUL-terminated UTF-8 paths.
#[no_mangle]
pub unsafe extern "C" fn asist_colorize(
    label_dir: *const c_char,
    out_dir: *const c_char,
) -> AsistStatus {
    let (dir, out) = match (path_arg(label_dir, "label_dir"), path_arg(out_dir, "out_dir")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    let result = masks::read_label_video(dir).and_then(|v| colorize::write_colorized(&v, out));
    match result {
        Ok(()) => AsistStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Opaque label-video handle.
pub struct AsistLabelVideo(LabelVideo);

/// Read a mask directory into an opaque handle.
///
/// # Safety
/// `dir` must be a valid path pointer; `out` a valid handle out-pointer.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_read(
    dir: *const c_char,
    out: *mut *mut AsistLabelVideo,
) -> AsistStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match path_arg(dir, "dir") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match masks::read_label_video(path) {
        Ok(v) => {
            *out = Box::into_raw(Box::new(AsistLabelVideo(v)));
            AsistStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `handle` must come from asist_label_video_read and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_free(handle: *mut AsistLabelVideo) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_frames(handle: *const AsistLabelVideo) -> u32 {
    handle.as_ref().map_or(0, |h| h.0.frames.len() as u32)
}

/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_width(handle: *const AsistLabelVideo) -> u32 {
    handle.as_ref().map_or(0, |h| h.0.width())
}

/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_height(handle: *const AsistLabelVideo) -> u32 {
    handle.as_ref().map_or(0, |h| h.0.height())
}

/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_tracks(handle: *const AsistLabelVideo) -> u32 {
    handle.as_ref().map_or(0, |h| h.0.tracks.len() as u32)
}

/// Copy frame `t` (row-major u32 ids) into `buf` of `len` entries.
///
/// # Safety
/// `handle` must be live; `buf` must point to at least `len` u32 slots.
#[no_mangle]
pub unsafe extern "C" fn asist_label_video_frame_labels(
    handle: *const AsistLabelVideo,
    t: u32,
    buf: *mut u32,
    len: usize,
) -> AsistStatus {
    let Some(h) = handle.as_ref() else {
        return null_arg("handle");
    };
    if buf.is_null() {
        return null_arg("buf");
    }
    let Some(frame) = h.0.frames.get(t as usize) else {
        set_error(format!("frame {t} out of range"));
        return AsistStatus::InvalidInput;
    };
    if len < frame.labels.len() {
        set_error(format!(
            "buffer holds {len} entries, frame needs {}",
            frame.labels.len()
        ));
        return AsistStatus::InvalidInput;
    }
    ptr::copy_nonoverlapping(frame.labels.as_ptr(), buf, frame.labels.len());
    AsistStatus::Ok
}

/// Opaque clustering result handle.
pub struct AsistClustering(Clustering);

/// Run seeded mean-shift over `n` points of `dim` doubles each (row-major).
///
/// # Safety
/// `points` must hold `n * dim` doubles; `params` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn asist_mean_shift(
    points: *const f64,
    n: usize,
    dim: usize,
    params: *const AsistMeanShiftParams,
    out: *mut *mut AsistClustering,
) -> AsistStatus {
    if points.is_null() || params.is_null() || out.is_null() {
        return null_arg("points/params/out");
    }
    let data = std::slice::from_raw_parts(points, n * dim);
    let p: MeanShiftParams = (&*params).into();
    match mean_shift(data, dim, &p, 0) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(AsistClustering(c)));
            AsistStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `handle` must come from asist_mean_shift and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn asist_clustering_free(handle: *mut AsistClustering) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asist_clustering_modes(handle: *const AsistClustering) -> usize {
    handle.as_ref().map_or(0, |h| h.0.modes.len())
}

/// Copy mode `k` into `buf` of `dim` doubles.
///
/// # Safety
/// `handle` must be live; `buf` must hold the clustering dimensionality.
#[no_mangle]
pub unsafe extern "C" fn asist_clustering_mode(
    handle: *const AsistClustering,
    k: usize,
    buf: *mut f64,
    len: usize,
) -> AsistStatus {
    let Some(h) = handle.as_ref() else {
        return null_arg("handle");
    };
    let Some(mode) = h.0.modes.get(k) else {
        set_error(format!("mode {k} out of range"));
        return AsistStatus::InvalidInput;
    };
    if buf.is_null() || len < mode.len() {
        set_error("mode buffer too small or null".into());
        return AsistStatus::InvalidInput;
    }
    ptr::copy_nonoverlapping(mode.as_ptr(), buf, mode.len());
    AsistStatus::Ok
}

/// Copy the point assignment into `buf`: mode index per point, -1 for
/// outliers.
///
/// # Safety
/// `handle` must be live; `buf` must hold one i64 per clustered point.
#[no_mangle]
pub unsafe extern "C" fn asist_clustering_assignment(
    handle: *const AsistClustering,
    buf: *mut i64,
    len: usize,
) -> AsistStatus {
    let Some(h) = handle.as_ref() else {
        return null_arg("handle");
    };
    if buf.is_null() || len < h.0.assignment.len() {
        set_error("assignment buffer too small or null".into());
        return AsistStatus::InvalidInput;
    }
    for (i, a) in h.0.assignment.iter().enumerate() {
        *buf.add(i) = a.map_or(-1, |k| k as i64);
    }
    AsistStatus::Ok
}
