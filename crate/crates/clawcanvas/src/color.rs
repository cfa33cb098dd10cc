//! The closed ten-name color palette.
//!
//! Scene records, canvas nodes, and layer recoloring all share this palette so
//! that color identity is exact end to end: a record that asks for "red" can
//! be verified against a canvas byte-for-byte, with no tolerance fuzz.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Red,
    Green,
    Blue,
    Yellow,
    Purple,
    Orange,
    Pink,
    Brown,
    Black,
    White,
}

pub const PALETTE: [Color; 10] = [
    Color::Red,
    Color::Green,
    Color::Blue,
    Color::Yellow,
    Color::Purple,
    Color::Orange,
    Color::Pink,
    Color::Brown,
    Color::Black,
    Color::White,
];

impl Color {
    /// The canonical RGB triple (CSS named-color values).
    pub fn rgb(&self) -> [u8; 3] {
        match self {
            Color::Red => [255, 0, 0],
            Color::Green => [0, 128, 0],
            Color::Blue => [0, 0, 255],
            Color::Yellow => [255, 255, 0],
            Color::Purple => [128, 0, 128],
            Color::Orange => [255, 165, 0],
            Color::Pink => [255, 192, 203],
            Color::Brown => [139, 69, 19],
            Color::Black => [0, 0, 0],
            Color::White => [255, 255, 255],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
            Color::Purple => "purple",
            Color::Orange => "orange",
            Color::Pink => "pink",
            Color::Brown => "brown",
            Color::Black => "black",
            Color::White => "white",
        }
    }

    /// Uppercase `#RRGGBB` form used in emitted SVG.
    pub fn hex(&self) -> String {
        let [r, g, b] = self.rgb();
        format!("#{r:02X}{g:02X}{b:02X}")
    }

    /// Inverse of [`Color::hex`]; only exact palette values map back.
    pub fn from_hex(s: &str) -> Option<Color> {
        PALETTE.iter().copied().find(|c| c.hex() == s)
    }
}

impl FromStr for Color {
    type Err = UnknownColor;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PALETTE
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownColor(s.to_string()))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("color '{0}' is not in the palette")]
pub struct UnknownColor(pub String);
