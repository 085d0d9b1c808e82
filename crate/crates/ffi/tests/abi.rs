//! Exercises the C ABI from Rust: every entry point is called exactly the
//! way a foreign client would call it, through raw pointers.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ptlab_ffi::{
    ptlab_entry_moment, ptlab_experiment_free, ptlab_experiment_from_json,
    ptlab_experiment_name, ptlab_experiment_predictions, ptlab_experiment_run,
    ptlab_experiment_set_seed, ptlab_flip_series, ptlab_last_error, ptlab_partition_count,
    ptlab_report_all_pass, ptlab_report_free, ptlab_report_render, ptlab_report_row_count,
    ptlab_string_free, ptlab_version, ptlab_wg_rational, ptlab_wg_symbolic_json,
    PtlabExperiment, PtlabFamily, PtlabFormat, PtlabReport, PtlabStatus,
};

fn last_error_message() -> String {
    unsafe {
        let needed = ptlab_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0u8; needed.max(1)];
        ptlab_last_error(buf.as_mut_ptr().cast::<c_char>(), buf.len());
        CStr::from_bytes_until_nul(&buf)
            .expect("error buffer is NUL-terminated")
            .to_string_lossy()
            .into_owned()
    }
}

/// Takes ownership of a `char*` the library handed out and frees it.
fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null(), "library returned a NULL string");
    unsafe {
        let text = CStr::from_ptr(ptr).to_string_lossy().into_owned();
        ptlab_string_free(ptr);
        text
    }
}

fn experiment_from(json: &str) -> *mut PtlabExperiment {
    let source = CString::new(json).unwrap();
    let mut handle: *mut PtlabExperiment = ptr::null_mut();
    let status = unsafe { ptlab_experiment_from_json(source.as_ptr(), &mut handle) };
    assert_eq!(status, PtlabStatus::Ok, "{}", last_error_message());
    assert!(!handle.is_null());
    handle
}

const BLOCKS_CONFIG: &str = r#"{"experiment":"blocks","symbols":"GG","b_grid":[4,8,16,32]}"#;

#[test]
fn version_is_a_nonempty_static_string() {
    let raw = ptlab_version();
    assert!(!raw.is_null());
    let text = unsafe { CStr::from_ptr(raw) }.to_str().unwrap();
    assert!(!text.is_empty());
    assert!(text.chars().next().unwrap().is_ascii_digit());
}

#[test]
fn experiment_runs_and_reports_through_handles() {
    let experiment = experiment_from(BLOCKS_CONFIG);

    let name = unsafe { CStr::from_ptr(ptlab_experiment_name(experiment)) };
    assert_eq!(name.to_str().unwrap(), "blocks");

    let mut report: *mut PtlabReport = ptr::null_mut();
    let status = unsafe { ptlab_experiment_run(experiment, &mut report) };
    assert_eq!(status, PtlabStatus::Ok, "{}", last_error_message());
    assert!(!report.is_null());

    let mut all_pass = 0u8;
    assert_eq!(
        unsafe { ptlab_report_all_pass(report, &mut all_pass) },
        PtlabStatus::Ok
    );
    assert_eq!(all_pass, 1);

    let mut rows = 0usize;
    assert_eq!(
        unsafe { ptlab_report_row_count(report, &mut rows) },
        PtlabStatus::Ok
    );
    assert_eq!(rows, 4, "2 sign-respecting pairings give 4 diagram rows");

    let mut text_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_report_render(report, PtlabFormat::Csv, &mut text_ptr) },
        PtlabStatus::Ok
    );
    let csv = take_string(text_ptr);
    assert!(csv.starts_with(
        "p,q,join_blocks,classifier_verdict,reason,fitted_exponent,leading_coefficient"
    ));
    assert_eq!(csv.lines().count(), 5);

    // Rendering twice must give byte-identical text.
    let mut again_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_report_render(report, PtlabFormat::Csv, &mut again_ptr) },
        PtlabStatus::Ok
    );
    assert_eq!(take_string(again_ptr), csv);

    let mut json_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_report_render(report, PtlabFormat::Json, &mut json_ptr) },
        PtlabStatus::Ok
    );
    let rendered = take_string(json_ptr);
    let parsed: serde_json::Value = serde_json::from_str(&rendered).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 4);

    unsafe {
        ptlab_report_free(report);
        ptlab_experiment_free(experiment);
    }
}

#[test]
fn predictions_render_without_sampling() {
    let config = r#"{
        "experiment": "limit_distribution",
        "ensemble": {"kind": "wishart", "n": 64},
        "dims": [[4, 4]],
        "max_order": 2,
        "samples": 8,
        "seed": 1
    }"#;
    let experiment = experiment_from(config);

    let mut csv_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_experiment_predictions(experiment, PtlabFormat::Csv, &mut csv_ptr) },
        PtlabStatus::Ok,
        "{}",
        last_error_message()
    );
    let csv = take_string(csv_ptr);
    assert!(csv.starts_with("word,b,d,value_re,value_im,exact"));
    assert!(csv.contains("AG AG,4,4,1.25,0,5/4"));

    let mut json_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_experiment_predictions(experiment, PtlabFormat::Json, &mut json_ptr) },
        PtlabStatus::Ok
    );
    let parsed: serde_json::Value = serde_json::from_str(&take_string(json_ptr)).unwrap();
    let rows = parsed.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    assert_eq!(rows[0]["word"], "AG");

    unsafe { ptlab_experiment_free(experiment) };
}

#[test]
fn seeding_is_rejected_where_nothing_is_random() {
    let experiment = experiment_from(BLOCKS_CONFIG);
    let status = unsafe { ptlab_experiment_set_seed(experiment, 7) };
    assert_eq!(status, PtlabStatus::ConfigError);
    assert!(last_error_message().contains("seed"));
    unsafe { ptlab_experiment_free(experiment) };
}

#[test]
fn null_and_malformed_inputs_yield_statuses_and_messages() {
    let mut handle: *mut PtlabExperiment = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_experiment_from_json(ptr::null(), &mut handle) },
        PtlabStatus::NullPointer
    );
    assert!(last_error_message().contains("NULL"));

    let bad = CString::new("{\"experiment\":\"no_such_thing\"}").unwrap();
    assert_eq!(
        unsafe { ptlab_experiment_from_json(bad.as_ptr(), &mut handle) },
        PtlabStatus::JsonError
    );
    assert!(!last_error_message().is_empty());
    assert!(handle.is_null(), "failed construction must not write a handle");

    let invalid_utf8: [c_char; 3] = [-1i8 as c_char, -1i8 as c_char, 0];
    assert_eq!(
        unsafe { ptlab_experiment_from_json(invalid_utf8.as_ptr(), &mut handle) },
        PtlabStatus::InvalidUtf8
    );
    assert!(last_error_message().contains("UTF-8"));

    let mut report: *mut PtlabReport = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_experiment_run(ptr::null(), &mut report) },
        PtlabStatus::NullPointer
    );
    assert_eq!(
        unsafe { ptlab_report_render(ptr::null(), PtlabFormat::Csv, &mut (ptr::null_mut())) },
        PtlabStatus::NullPointer
    );

    // A success clears the message.
    let experiment = experiment_from(BLOCKS_CONFIG);
    assert!(last_error_message().is_empty());
    unsafe { ptlab_experiment_free(experiment) };
}

#[test]
fn error_messages_survive_truncating_buffers() {
    let mut handle: *mut PtlabExperiment = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_experiment_from_json(ptr::null(), &mut handle) },
        PtlabStatus::NullPointer
    );

    let needed = unsafe { ptlab_last_error(ptr::null_mut(), 0) };
    assert!(needed > 1, "a failure must leave a message");

    let mut tiny = [0 as c_char; 5];
    let reported = unsafe { ptlab_last_error(tiny.as_mut_ptr(), tiny.len()) };
    assert_eq!(reported, needed, "reported length is the full length");
    assert_eq!(tiny[4], 0, "truncated copy is still NUL-terminated");
    let prefix = unsafe { CStr::from_ptr(tiny.as_ptr()) }.to_str().unwrap();
    assert_eq!(prefix.len(), 4);
    assert!(last_error_message().starts_with(prefix));
}

#[test]
fn exact_values_cross_the_boundary_as_strings() {
    let parts = [2u64];
    let mut text_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_wg_rational(parts.as_ptr(), 1, 2, 16, &mut text_ptr) },
        PtlabStatus::Ok,
        "{}",
        last_error_message()
    );
    assert_eq!(take_string(text_ptr), "-1/4080");

    // Padding with fixed points up to the order: [2] at order 3 is [2,1].
    let mut padded_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_wg_rational(parts.as_ptr(), 1, 3, 8, &mut padded_ptr) },
        PtlabStatus::Ok
    );
    assert_eq!(take_string(padded_ptr), "-1/3780");

    // Parts exceeding the requested order are rejected.
    let big = [3u64];
    let mut reject_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_wg_rational(big.as_ptr(), 1, 2, 8, &mut reject_ptr) },
        PtlabStatus::InvalidArgument
    );
    assert!(reject_ptr.is_null());

    let mut symbolic_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_wg_symbolic_json(parts.as_ptr(), 1, 0, &mut symbolic_ptr) },
        PtlabStatus::Ok
    );
    let symbolic: serde_json::Value =
        serde_json::from_str(&take_string(symbolic_ptr)).unwrap();
    assert_eq!(symbolic["cycle_type"], serde_json::json!([2]));
    assert_eq!(symbolic["numerator"], serde_json::json!(["-1"]));
    assert_eq!(
        symbolic["denominator"],
        serde_json::json!(["0", "-1", "0", "1"])
    );
    assert_eq!(symbolic["display"], "(-1) / (M^3 - M)");

    let word = CString::new("1.1 2.2 1.1* 2.2*").unwrap();
    let mut moment_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_entry_moment(word.as_ptr(), 8, &mut moment_ptr) },
        PtlabStatus::Ok
    );
    assert_eq!(take_string(moment_ptr), "1/63");

    let unbalanced = CString::new("1.1 2.2").unwrap();
    let mut zero_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_entry_moment(unbalanced.as_ptr(), 8, &mut zero_ptr) },
        PtlabStatus::Ok
    );
    assert_eq!(take_string(zero_ptr), "0");

    let garbage = CString::new("what").unwrap();
    let mut fail_ptr: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { ptlab_entry_moment(garbage.as_ptr(), 8, &mut fail_ptr) },
        PtlabStatus::ParseError
    );
}

#[test]
fn partition_counts_match_the_catalogued_families() {
    let expectations = [
        (PtlabFamily::Pairings, 3usize, 15u64),
        (PtlabFamily::SignRespectingPairings, 3, 6),
        (PtlabFamily::Noncrossing, 4, 14),
        (PtlabFamily::SmallBlockNoncrossing, 4, 9),
        (PtlabFamily::Admissible, 3, 7),
        (PtlabFamily::SetPartitions, 4, 15),
    ];
    for (family, size, expected) in expectations {
        let mut count = 0u64;
        assert_eq!(
            unsafe { ptlab_partition_count(family, size, &mut count) },
            PtlabStatus::Ok,
            "{}",
            last_error_message()
        );
        assert_eq!(count, expected, "{family:?} at size {size}");
    }
}

#[test]
fn flip_series_reproduces_the_quarter_ratio_law() {
    // Second moment 1.25 with mean 1 leaves a second cumulant of 1/4.
    let m1 = [1.0f64, 0.0];
    let m1_star = [1.0f64, 0.0];
    let m2 = [1.25f64, 0.0, 1.25, 0.0, 1.25, 0.0, 1.25, 0.0];
    let mut moments = [0.0f64; 8];
    let mut cumulants = [0.0f64; 8];
    let status = unsafe {
        ptlab_flip_series(
            m1.as_ptr(),
            m1_star.as_ptr(),
            m2.as_ptr(),
            4,
            moments.as_mut_ptr(),
            cumulants.as_mut_ptr(),
        )
    };
    assert_eq!(status, PtlabStatus::Ok, "{}", last_error_message());
    assert_eq!(moments, [1.0, 0.0, 1.25, 0.0, 1.75, 0.0, 2.625, 0.0]);
    assert_eq!(cumulants, [1.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]);

    let mut nothing = [0.0f64; 2];
    assert_eq!(
        unsafe {
            ptlab_flip_series(
                m1.as_ptr(),
                m1_star.as_ptr(),
                m2.as_ptr(),
                0,
                nothing.as_mut_ptr(),
                nothing.as_mut_ptr(),
            )
        },
        PtlabStatus::InvalidArgument
    );
    assert!(last_error_message().contains("max_order"));
}

#[test]
fn generated_header_declares_the_surface() {
    let header_path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ptlab.h");
    let header = std::fs::read_to_string(header_path).expect("header is generated at build time");
    for needle in [
        "PtlabStatus",
        "PtlabFormat",
        "PtlabFamily",
        "typedef struct PtlabExperiment PtlabExperiment;",
        "typedef struct PtlabReport PtlabReport;",
        "ptlab_last_error",
        "ptlab_flip_series",
        "ptlab_version",
    ] {
        assert!(header.contains(needle), "header lacks {needle}");
    }
}
