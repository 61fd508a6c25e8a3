use std::ffi::{CStr, CString};
use std::ptr;

use hamres_ffi::*;

fn parse(text: &str) -> *mut HrSet {
    let text = CString::new(text).unwrap();
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { hr_set_parse(text.as_ptr(), &mut set) }, HrError::Ok);
    set
}

fn verify(set: *const HrSet, method: HrMethod) -> *mut HrVerdict {
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { hr_verify(set, method, 11, 0, 2, &mut v) }, HrError::Ok);
    v
}

#[test]
fn verdicts_and_witnesses() {
    let r0 = parse("k=2 a=3\n02\n11\n");
    let r1 = parse("k=2 a=3\n02\n11\n22\n");
    unsafe {
        assert_eq!((hr_set_len(r0), hr_set_k(r0), hr_set_a(r0)), (2, 2, 3));
        for m in [
            HrMethod::Brute,
            HrMethod::Groebner,
            HrMethod::IlpExact,
            HrMethod::IlpFeasibility,
            HrMethod::IlpRandomObjective,
        ] {
            let v = verify(r1, m);
            assert_eq!(hr_verdict_status(v), HrStatus::Resolving);
            hr_verdict_free(v);

            let v = verify(r0, m);
            assert_eq!(hr_verdict_status(v), HrStatus::NotResolving);
            let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
            assert_eq!(hr_verdict_witness(v, &mut x, &mut y), HrError::Ok);
            let pair = (
                CStr::from_ptr(x).to_str().unwrap().to_string(),
                CStr::from_ptr(y).to_str().unwrap().to_string(),
            );
            let expected = [("12", "01"), ("21", "10"), ("00", "22")];
            assert!(
                expected
                    .iter()
                    .any(|(a, b)| (pair.0 == *a && pair.1 == *b) || (pair.0 == *b && pair.1 == *a)),
                "{pair:?}"
            );
            hr_string_free(x);
            hr_string_free(y);
            hr_verdict_free(v);
        }
        hr_set_free(r0);
        hr_set_free(r1);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("k=2 a=3\n0Z\n").unwrap();
    let mut set = ptr::null_mut();
    unsafe {
        assert_eq!(hr_set_parse(bad.as_ptr(), &mut set), HrError::Parse);
        assert!(set.is_null());
        let msg = CStr::from_ptr(hr_last_error()).to_str().unwrap();
        assert!(msg.contains("line 2"), "{msg}");
        assert_eq!(hr_set_parse(ptr::null(), &mut set), HrError::NullPointer);
        let missing = CString::new("/nonexistent/set.hrs").unwrap();
        assert_eq!(hr_set_read(missing.as_ptr(), &mut set), HrError::Io);
        let mut v = ptr::null_mut();
        assert_eq!(hr_verify(ptr::null(), HrMethod::Brute, 0, 0, 1, &mut v), HrError::NullPointer);
        hr_set_free(ptr::null_mut());
        hr_verdict_free(ptr::null_mut());
        hr_string_free(ptr::null_mut());
        assert_eq!(hr_set_len(ptr::null()), 0);
    }
}

#[test]
fn embedding_through_the_shipped_basis() {
    let mut basis = ptr::null_mut();
    unsafe {
        assert_eq!(hr_set_shipped(&mut basis), HrError::Ok);
        assert_eq!(hr_set_len(basis), 77);
        let seq = CString::new("aaaraaaa").unwrap();
        let mut len = 0;
        let mut small = [0u32; 4];
        assert_eq!(
            hr_embed(basis, seq.as_ptr(), small.as_mut_ptr(), small.len(), &mut len),
            HrError::BufferTooSmall
        );
        assert_eq!(len, 77);
        let mut buf = vec![u32::MAX; 77];
        assert_eq!(hr_embed(basis, seq.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut len), HrError::Ok);
        assert_eq!(buf[0], 0);
        assert!(buf.iter().all(|&d| d <= 8));
        let bad = CString::new("aaaZaaaa").unwrap();
        assert_eq!(hr_embed(basis, bad.as_ptr(), buf.as_mut_ptr(), buf.len(), &mut len), HrError::Parse);
        hr_set_free(basis);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hamres.h")).unwrap();
    for name in [
        "hr_last_error",
        "hr_set_parse",
        "hr_set_read",
        "hr_set_shipped",
        "hr_set_free",
        "hr_verify",
        "hr_verdict_status",
        "hr_verdict_witness",
        "hr_verdict_free",
        "hr_string_free",
        "hr_embed",
        "typedef struct HrSet HrSet;",
        "HR_ERROR_OK = 0",
        "HR_STATUS_NOT_RESOLVING = 1",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
    // compile check when a C compiler is around
    if let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hamres.h"))
        .status()
    {
        assert!(status.success());
    }
}
