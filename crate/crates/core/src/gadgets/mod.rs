//! Stabilizer tableaux and the amplifier and router gadgets.

mod amplifier;
mod router;
pub mod tableau;

pub use amplifier::{build_amplifier, post_field_code, verify_amplifier, Amplifier, AmplifierReport};
pub use router::{
    extended_router_graph, extended_router_spec, router_final, router_initial, router_initial_state,
    router_sector_ops, router_spec, sector_gap, verify_extended_router, verify_router, RouterField,
    RouterReport, ROUTER_SECTOR,
};
pub use tableau::{graph_stabilizers, Membership, SignedPauli, StabilizerTableau};
