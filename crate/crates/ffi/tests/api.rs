use std::ffi::{CStr, CString};
use std::ptr;

use evencycle_ffi::*;

fn graph(n: usize, edges: &[(u32, u32)]) -> *mut EcGraph {
    let flat: Vec<u32> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ec_graph_from_edges(n, flat.as_ptr(), edges.len(), &mut g) }, EcStatus::Ok);
    g
}

fn cycle(n: u32) -> Vec<(u32, u32)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ec_last_error()) }.to_str().unwrap().to_string()
}

fn bipartite(a: u32, b: u32) -> *mut EcGraph {
    let edges: Vec<_> = (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y))).collect();
    graph((a + b) as usize, &edges)
}

#[test]
fn build_parse_and_count() {
    let g = graph(6, &cycle(6));
    let (mut n, mut m) = (0, 0);
    unsafe {
        assert_eq!(ec_graph_counts(g, &mut n, &mut m), EcStatus::Ok);
        ec_graph_free(g);
    }
    assert_eq!((n, m), (6, 6));

    let text = CString::new("4 3\n0 1\n1 2\n2 3\n").unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(ec_graph_parse(text.as_ptr(), &mut p), EcStatus::Ok);
        assert_eq!(ec_graph_counts(p, ptr::null_mut(), &mut m), EcStatus::Ok);
        ec_graph_free(p);
    }
    assert_eq!(m, 3);
}

#[test]
fn rejects_bad_input() {
    let mut g = ptr::null_mut();
    let bad = CString::new("3 1\n0 zero\n").unwrap();
    unsafe {
        assert_eq!(ec_graph_parse(bad.as_ptr(), &mut g), EcStatus::ParseError);
        assert!(last_error().contains("line"));
        assert_eq!(ec_graph_from_edges(3, [0u32, 0].as_ptr(), 1, &mut g), EcStatus::InvalidArgument);
        assert!(last_error().contains("self-loop"));
        assert_eq!(ec_graph_from_edges(3, [0u32, 7].as_ptr(), 1, &mut g), EcStatus::InvalidArgument);
        assert_eq!(ec_graph_counts(ptr::null(), ptr::null_mut(), ptr::null_mut()), EcStatus::InvalidArgument);
        assert_eq!(ec_graph_parse(ptr::null(), &mut g), EcStatus::InvalidArgument);
        ec_graph_free(ptr::null_mut());
        ec_report_free(ptr::null_mut());
        ec_string_free(ptr::null_mut());
    }
    assert!(g.is_null());
}

#[test]
fn oracle_and_verification() {
    let g = graph(8, &cycle(6));
    let mut buf = [0u32; 8];
    let mut len = 0;
    unsafe {
        assert_eq!(ec_find_cycle(g, 6, buf.as_mut_ptr(), 2, &mut len), EcStatus::BufferTooSmall);
        assert_eq!(len, 6);
        assert_eq!(ec_find_cycle(g, 6, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::Ok);
        let mut valid = 0;
        assert_eq!(ec_verify_cycle(g, buf.as_ptr(), len, 6, &mut valid), EcStatus::Ok);
        assert_eq!(valid, 1);
        assert_eq!(ec_verify_cycle(g, buf.as_ptr(), len, 4, &mut valid), EcStatus::Ok);
        assert_eq!(valid, 0);
        assert_eq!(ec_find_cycle(g, 4, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::NotFound);
        assert_eq!(len, 0);
        assert_eq!(ec_find_cycle(g, 5, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::InvalidArgument);
        ec_graph_free(g);

        let big = graph(201, &[]);
        assert_eq!(ec_find_cycle(big, 4, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::Limit);
        ec_graph_free(big);
    }
}

#[test]
fn detection_reports() {
    let g = graph(6, &cycle(6));
    let mut r = ptr::null_mut();
    let mut o = EcOutcome::default();
    let mut buf = [0u32; 6];
    let mut len = 0;
    unsafe {
        assert_eq!(ec_run_c2k(g, 3, 0, &mut r), EcStatus::Ok);
        assert_eq!(ec_report_outcome(r, &mut o), EcStatus::Ok);
        assert_eq!(o.reject, 1);
        assert_eq!(o.witness_len, 6);
        assert!(o.words_sent > 0);
        assert_eq!(ec_report_witness(r, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::Ok);
        let mut valid = 0;
        ec_verify_cycle(g, buf.as_ptr(), len, 6, &mut valid);
        assert_eq!(valid, 1);

        let mut json = ptr::null_mut();
        assert_eq!(ec_report_to_json(r, &mut json), EcStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(doc["algorithm"], "c2k");
        assert_eq!(doc["outcome"]["verdict"], "reject");
        assert_eq!(doc["outcome"]["rounds_used"], o.rounds_used);
        ec_string_free(json);
        ec_report_free(r);

        assert_eq!(ec_run_c4(g, 0, &mut r), EcStatus::Ok);
        ec_report_outcome(r, &mut o);
        assert_eq!(o.reject, 0);
        assert_eq!(ec_report_witness(r, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::NotFound);
        ec_report_free(r);

        assert_eq!(ec_run_c2k(g, 3, 2, &mut r), EcStatus::Timeout);
        assert!(last_error().contains("limit 2"));
        assert_eq!(ec_run_c2k(g, 1, 0, &mut r), EcStatus::InvalidArgument);
        ec_graph_free(g);
    }
}

#[test]
fn density_certificates() {
    let mut buf = [0u32; 4];
    let mut len = 0;
    unsafe {
        let dense = bipartite(50, 50);
        assert_eq!(ec_density_extract(dense, 2, 1, 7, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::Ok);
        let mut valid = 0;
        ec_verify_cycle(dense, buf.as_ptr(), len, 4, &mut valid);
        assert_eq!(valid, 1);
        assert_eq!(ec_density_extract(dense, 2, 2, 7, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::InvalidArgument);
        ec_graph_free(dense);

        let sparse = bipartite(30, 30);
        assert_eq!(ec_density_extract(sparse, 2, 1, 0, buf.as_mut_ptr(), buf.len(), &mut len), EcStatus::Precondition);
        assert!(last_error().contains("1440"));
        ec_graph_free(sparse);
    }
}
