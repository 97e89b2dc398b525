use std::ffi::{c_char, CStr};
use std::path::Path;
use std::process::Command;
use std::ptr;

use cubiclab_ffi::*;

fn last_error() -> String {
    let p = cubiclab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn field(a: i64, b: i64, c: i64) -> *mut CubiclabField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { cubiclab_field_new(a, b, c, 0, &mut f) }, CubiclabStatus::Ok);
    f
}

#[test]
fn class_group_round_trip() {
    let f = field(0, 4, -1);
    let mut d = 0i64;
    let mut r1 = 0u32;
    unsafe {
        assert_eq!(cubiclab_field_discriminant(f, &mut d), CubiclabStatus::Ok);
        assert_eq!(cubiclab_field_real_places(f, &mut r1), CubiclabStatus::Ok);
    }
    assert_eq!((d, r1), (-283, 1));
    for oracle in [false, true] {
        let mut cg = ptr::null_mut();
        unsafe {
            assert_eq!(cubiclab_class_group(f, 3, oracle, &mut cg), CubiclabStatus::Ok);
            assert_eq!(cubiclab_class_group_order(cg), 2);
            assert_eq!(cubiclab_class_group_two_rank(cg), 1);
            let mut buf = [0u64; 4];
            let mut len = 0usize;
            assert_eq!(cubiclab_class_group_divisors(cg, buf.as_mut_ptr(), buf.len(), &mut len), CubiclabStatus::Ok);
            assert_eq!(&buf[..len], &[2]);
            let (mut lo, mut hi) = (0.0, 0.0);
            assert_eq!(cubiclab_class_group_regulator(cg, &mut lo, &mut hi), CubiclabStatus::Ok);
            assert!(lo <= hi && lo > 1.0);
            let mut cert = CubiclabCertification::Heuristic;
            assert_eq!(cubiclab_class_group_certification(cg, &mut cert), CubiclabStatus::Ok);
            assert_eq!(
                cert,
                if oracle { CubiclabCertification::Oracle } else { CubiclabCertification::Certified }
            );
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(cubiclab_class_group_json(cg, &mut json), CubiclabStatus::Ok);
            let s = CStr::from_ptr(json).to_str().unwrap().to_owned();
            assert!(s.contains("\"elementary_divisors\":[2]"));
            cubiclab_string_free(json);
            cubiclab_class_group_free(cg);
        }
    }
    unsafe { cubiclab_field_free(f) };
}

#[test]
fn errors_are_reported() {
    let mut f = ptr::null_mut();
    // x^3 - 1 is reducible
    assert_eq!(unsafe { cubiclab_field_new(0, 0, -1, 0, &mut f) }, CubiclabStatus::InvalidArgument);
    assert!(f.is_null());
    assert!(last_error().contains("reducible"));
    assert_eq!(unsafe { cubiclab_field_new(0, 1, 1, 0, ptr::null_mut()) }, CubiclabStatus::NullPointer);
    let mut d = 0;
    assert_eq!(unsafe { cubiclab_field_discriminant(ptr::null(), &mut d) }, CubiclabStatus::NullPointer);
    assert_eq!(unsafe { cubiclab_class_group_order(ptr::null()) }, 0);
    unsafe {
        cubiclab_field_free(ptr::null_mut());
        cubiclab_class_group_free(ptr::null_mut());
        cubiclab_string_free(ptr::null_mut());
    }
}

#[test]
fn family_discriminant_and_overflow() {
    let mut d = 0;
    assert_eq!(unsafe { cubiclab_family_discriminant(2, 1, &mut d) }, CubiclabStatus::Ok);
    assert_eq!(d, -23);
    assert_eq!(unsafe { cubiclab_family_discriminant(1 << 40, 1 << 40, &mut d) }, CubiclabStatus::Overflow);
}

#[test]
fn moments_verdicts() {
    let ex = [1u32];
    let mut feasible = true;
    let mut json: *mut c_char = ptr::null_mut();
    unsafe {
        assert_eq!(
            cubiclab_moments_feasible(0, ex.as_ptr(), 1, 3, 2, 3, 1, &mut feasible, &mut json),
            CubiclabStatus::Ok
        );
        assert!(!feasible);
        let s = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(s.contains("\"slope\":\"5\"") && s.contains("\"intercept\":\"-4\""));
        cubiclab_string_free(json);
        assert_eq!(
            cubiclab_moments_feasible(0, ex.as_ptr(), 1, 2, 1, 6, 1, &mut feasible, ptr::null_mut()),
            CubiclabStatus::Ok
        );
        assert!(feasible);
        assert_eq!(
            cubiclab_moments_feasible(0, ptr::null(), 0, 1, 0, 6, 1, &mut feasible, ptr::null_mut()),
            CubiclabStatus::InvalidArgument
        );
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(cubiclab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cubiclab.h");
    assert!(header.exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"cubiclab.h\"\nint main(void) {\n  CubiclabField *f = 0;\n  CubiclabStatus s = cubiclab_field_new(0, -1, -1, 0, &f);\n  cubiclab_field_free(f);\n  return s == CUBICLAB_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(header.parent().unwrap())
            .arg(&src)
            .output()
        else {
            eprintln!("{compiler} not available; skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
