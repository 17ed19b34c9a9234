pub mod logic;
pub mod models;
pub mod syntax;
pub mod tableau;
pub mod interpolation;
pub mod definability;
pub mod theory;
pub mod access;
pub mod fragments;
pub mod corpus;
pub mod cli;
