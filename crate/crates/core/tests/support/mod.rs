pub mod bubbles;
pub mod oracle;
