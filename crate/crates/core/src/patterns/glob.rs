use std::fmt;

/// Path glob over `/`-separated paths: `*` matches within a segment, `?` a
/// single character, and a bare `**` segment matches zero or more whole
/// segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Glob {
    pattern: String,
    segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Segment {
    AnyDirs,
    Literal(String),
}

impl Glob {
    pub fn new(pattern: impl Into<String>) -> Glob {
        let pattern = pattern.into();
        let segments = pattern
            .split('/')
            .map(|s| {
                if s == "**" {
                    Segment::AnyDirs
                } else {
                    Segment::Literal(s.to_string())
                }
            })
            .collect();
        Glob { pattern, segments }
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn matches(&self, path: &str) -> bool {
        let parts: Vec<&str> = path.split('/').collect();
        match_segments(&self.segments, &parts)
    }
}

impl fmt::Display for Glob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern)
    }
}

fn match_segments(pattern: &[Segment], parts: &[&str]) -> bool {
    match pattern.first() {
        None => parts.is_empty(),
        Some(Segment::AnyDirs) => (0..=parts.len())
            .any(|skip| match_segments(&pattern[1..], &parts[skip..])),
        Some(Segment::Literal(lit)) => match parts.first() {
            Some(part) => {
                match_one_segment(lit.as_bytes(), part.as_bytes())
                    && match_segments(&pattern[1..], &parts[1..])
            }
            None => false,
        },
    }
}

fn match_one_segment(pattern: &[u8], text: &[u8]) -> bool {
    match pattern.first() {
        None => text.is_empty(),
        Some(b'*') => (0..=text.len())
            .any(|skip| match_one_segment(&pattern[1..], &text[skip..])),
        Some(b'?') => !text.is_empty() && match_one_segment(&pattern[1..], &text[1..]),
        Some(&c) => text.first() == Some(&c) && match_one_segment(&pattern[1..], &text[1..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_stays_within_a_segment() {
        let g = Glob::new("*.code");
        assert!(g.matches("Ping.code"));
        assert!(!g.matches("dir/Ping.code"));
    }

    #[test]
    fn double_star_crosses_segments() {
        let g = Glob::new("**");
        assert!(g.matches("a"));
        assert!(g.matches("a/b/c"));

        let g = Glob::new("**/*.code");
        assert!(g.matches("Ping.code"));
        assert!(g.matches("x/y/Ping.code"));
        assert!(!g.matches("Ping.txt"));

        let g = Glob::new("msgs/**/out.txt");
        assert!(g.matches("msgs/out.txt"));
        assert!(g.matches("msgs/a/b/out.txt"));
        assert!(!g.matches("other/out.txt"));
    }

    #[test]
    fn question_mark_matches_one_char() {
        let g = Glob::new("?.code");
        assert!(g.matches("a.code"));
        assert!(!g.matches("ab.code"));
        assert!(!g.matches(".code"));
    }

    #[test]
    fn literal_segments_must_match_exactly() {
        let g = Glob::new("msgs/Ping.code");
        assert!(g.matches("msgs/Ping.code"));
        assert!(!g.matches("msgs/Pong.code"));
        assert!(!g.matches("msgs/Ping.code/extra"));
    }

    #[test]
    fn placeholders_in_paths_still_match() {
        // Rewritten path templates keep matching later rules' scopes.
        let g = Glob::new("msgs/*.code");
        assert!(g.matches("msgs/{{name}}.code"));
    }
}
