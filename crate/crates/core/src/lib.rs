//! Classification tools for Leavitt path algebras of finite directed
//! multigraphs: pointed K0 invariants, graph moves, and verifiable move
//! certificates.

pub mod cli;
pub mod error;
pub mod explorer;
pub mod graph;
pub mod iso;
pub mod k0;
pub mod matrix;
pub mod moves;
pub mod pipeline;
pub mod smith;

pub use error::{Error, Result};
pub use graph::{parse_graph, MultiGraph, PropertyReport};
pub use k0::{group_iso, k0_data, k1_rank, pointed_iso, PointedK0};
pub use matrix::{parse_matrix, IntMatrix};
pub use smith::{cokernel, is_unimodular, kernel_rank, project, smith_normal_form, AbelianGroup, SmithForm};
pub use explorer::{classify, enumerate_pis_sing, find_path, ClassificationTable, PathSearch, SearchBounds};
pub use iso::{canonical_form, graph_iso};
pub use moves::{
    apply_amalgamate, apply_outsplit, apply_shift, apply_unshift, maximal_outsplit, shift_applicable,
    verify_certificate, MoveCertificate, MoveStep, PartitionSpec, VerificationReport,
};
pub use pipeline::{
    cert_divides, cert_expand, cert_fish, cert_open_tails, cert_remove_sources, cert_stabilize, elementary_k,
    euclid_s, phi, phi_shift_cert, CertBuilder, EuclidResult,
};
