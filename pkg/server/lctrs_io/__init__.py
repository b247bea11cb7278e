"""Text format: lexer, parser, printer and JSON export."""
