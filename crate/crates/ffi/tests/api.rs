use std::ffi::CStr;
use std::ptr;

use voros_ffi::*;

const ZERO: VorosComplex = VorosComplex { re: 0.0, im: 0.0 };

fn last_error() -> String {
    unsafe {
        let n = voros_last_error_message(ptr::null_mut(), 0);
        if n == 0 {
            return String::new();
        }
        let mut buf = vec![0u8; n];
        assert_eq!(voros_last_error_message(buf.as_mut_ptr().cast(), n), n);
        CStr::from_bytes_with_nul(&buf).unwrap().to_str().unwrap().to_owned()
    }
}

fn quartic() -> *mut VorosProduct {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { voros_quantize_exponent(4.0, 48, 1e-10, 200, &mut h) }, VorosStatus::Ok, "{}", last_error());
    assert!(!h.is_null());
    h
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(voros_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn quantized_levels_match_the_oracle() {
    let product = quartic();
    let mut oracle = ptr::null_mut();
    unsafe {
        assert_eq!(voros_oracle_new(4.0, 1, &mut oracle), VorosStatus::Ok);
        let mut count = 0;
        assert_eq!(voros_product_level_count(product, &mut count), VorosStatus::Ok);
        assert_eq!(count, 48);
        let mut levels = vec![0.0; count];
        let mut written = 0;
        assert_eq!(voros_product_levels(product, levels.as_mut_ptr(), count, &mut written), VorosStatus::Ok);
        assert_eq!(written, count);

        let mut halfline = [0.0; 6];
        assert_eq!(voros_oracle_halfline_levels(oracle, 6, halfline.as_mut_ptr(), &mut written), VorosStatus::Ok);
        assert_eq!(written, 6);
        for k in 0..6 {
            assert!(((levels[k] - halfline[k]) / halfline[k]).abs() < 1e-6, "{k}: {} vs {}", levels[k], halfline[k]);
        }
        // the wrong-sign quartic ground state, from the literature
        let mut pt = [0.0; 1];
        assert_eq!(voros_oracle_eigenvalues(oracle, 1, pt.as_mut_ptr(), &mut written), VorosStatus::Ok);
        assert!((pt[0] - 1.477_149_754).abs() < 1e-7, "{}", pt[0]);

        let (mut converged, mut residual) = (false, f64::NAN);
        assert_eq!(voros_product_convergence(product, &mut converged, &mut residual), VorosStatus::Ok);
        assert!(converged && residual < 1e-10);

        // the ODE determinant vanishes at -E_k in the oracle's variable, up to
        // the level error times f', both of order 1e-7 here
        let mut f = ZERO;
        let lambda = VorosComplex { re: -levels[0], im: 0.0 };
        assert_eq!(voros_oracle_determinant(oracle, lambda, &mut f), VorosStatus::Ok);
        assert!(f.re.abs() < 1e-6 && f.im.abs() < 1e-6, "{f:?}");
        voros_oracle_free(oracle);
        voros_product_free(product);
    }
}

#[test]
fn stokes_values_at_the_origin() {
    let product = quartic();
    unsafe {
        let (mut c, mut d) = (ZERO, ZERO);
        assert_eq!(voros_stokes_c(product, ZERO, &mut c), VorosStatus::Ok);
        assert_eq!(voros_stokes_d(product, ZERO, &mut d), VorosStatus::Ok);
        // with alpha = pi / 3 and offset pi / 6: C(0) = 2 cos(pi / 6), D(0) = C(0)^2 - 1
        assert!((c.re - 3f64.sqrt()).abs() < 1e-12 && c.im.abs() < 1e-12, "{c:?}");
        assert!((d.re - 2.0).abs() < 1e-10 && d.im.abs() < 1e-10, "{d:?}");

        let mut oracle = ptr::null_mut();
        assert_eq!(voros_oracle_new(4.0, 1, &mut oracle), VorosStatus::Ok);
        let (mut c0, mut d0) = (ZERO, ZERO);
        assert_eq!(voros_oracle_c0(oracle, ZERO, &mut c0), VorosStatus::Ok);
        assert_eq!(voros_oracle_d0(oracle, ZERO, &mut d0), VorosStatus::Ok);
        assert!((c0.re - c.re).abs() < 1e-8, "{c0:?}");
        assert!((d0.re - d.re).abs() < 1e-8, "{d0:?}");
        voros_oracle_free(oracle);
        voros_product_free(product);
    }
}

#[test]
fn finite_product_from_levels() {
    let levels = [1.0, 4.0, 9.0];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            voros_product_from_levels(levels.as_ptr(), 3, std::f64::consts::FRAC_PI_3, 0.0, &mut h),
            VorosStatus::Ok
        );
        let mut v = ZERO;
        assert_eq!(voros_product_eval(h, VorosComplex { re: -2.0, im: 0.0 }, &mut v), VorosStatus::Ok);
        let want: f64 = levels.iter().map(|e| 1.0 + 2.0 / e).product();
        assert!((v.re - want).abs() < 1e-12 * want && v.im.abs() < 1e-12, "{v:?}");

        let mut small = [0.0; 2];
        let mut written = 0;
        assert_eq!(voros_product_levels(h, small.as_mut_ptr(), 2, &mut written), VorosStatus::BufferTooSmall);
        assert_eq!(written, 3);
        voros_product_free(h);
    }
}

#[test]
fn errors_are_reported() {
    let mut h: *mut VorosProduct = ptr::null_mut();
    unsafe {
        assert_eq!(voros_quantize(1.6, 0.0, 8, 1e-10, 200, &mut h), VorosStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(!last_error().is_empty());

        let unsorted = [2.0, 1.0];
        let status = voros_product_from_levels(unsorted.as_ptr(), 2, 1.0, 0.0, &mut h);
        assert_eq!(status, VorosStatus::InvalidArgument);
        assert!(last_error().contains("index 2"), "{}", last_error());

        assert_eq!(voros_product_level_count(ptr::null(), &mut 0), VorosStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut o = ptr::null_mut();
        assert_eq!(voros_oracle_new(1.0, 1, &mut o), VorosStatus::InvalidArgument);
        assert_eq!(voros_oracle_new(4.0, 1, ptr::null_mut()), VorosStatus::NullPointer);

        // a successful call clears the message
        assert_eq!(voros_product_from_levels([1.0].as_ptr(), 1, 1.0, 0.0, &mut h), VorosStatus::Ok);
        assert_eq!(voros_last_error_message(ptr::null_mut(), 0), 0);
        voros_product_free(h);
        voros_product_free(ptr::null_mut());
        voros_oracle_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_message_is_terminated() {
    unsafe {
        voros_quantize(1.6, 0.0, 8, 1e-10, 200, &mut ptr::null_mut());
        let mut buf = [0x7fu8; 8];
        let need = voros_last_error_message(buf.as_mut_ptr().cast(), buf.len());
        assert!(need > buf.len());
        assert_eq!(buf[7], 0);
        assert!(buf[..7].iter().all(|&b| b != 0));
    }
}

#[test]
fn not_converged_still_returns_a_handle() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(voros_quantize_exponent(3.0, 16, 1e-10, 1, &mut h), VorosStatus::NotConverged);
        assert!(!h.is_null());
        assert!(last_error().contains("convergence"));
        let mut converged = true;
        assert_eq!(voros_product_convergence(h, &mut converged, &mut 0.0), VorosStatus::Ok);
        assert!(!converged);
        voros_product_free(h);
    }
}
