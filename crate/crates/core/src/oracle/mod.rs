//! Independent numerical checks of the closed forms.

pub mod fd;
pub mod gram;
pub mod residual;
pub mod verify;
