#include <gtest/gtest.h>

#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/text.hpp"

using namespace fedqa;
using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(text::tokenize("Ontology Learning, from text!"), (Tokens{"ontology", "learning", "from", "text"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(text::tokenize("").empty()); }

TEST(Tokenize, AlphanumericRunKeptWhole) { EXPECT_EQ(text::tokenize("BM25Plus"), (Tokens{"bm25plus"})); }

TEST(Tokenize, UnicodeLettersFoldAndStayTogether) {
  EXPECT_EQ(text::tokenize("Ärger über Σίσυφος"), (Tokens{"ärger", "über", "σίσυφος"}));
  EXPECT_EQ(text::tokenize("a\xff" "b"), (Tokens{"a", "b"}));
}

TEST(Text, TrimCollapseJoin) {
  EXPECT_EQ(text::trim("  x y \n"), "x y");
  EXPECT_EQ(text::collapse_whitespace("  a \t b\n\nc "), "a b c");
  EXPECT_EQ(text::join({}, ","), "");
  EXPECT_EQ(text::join({"a", "b"}, ", "), "a, b");
}

TEST(Text, CaseInsensitiveMatching) {
  EXPECT_TRUE(text::contains_icase("Ontology LEARNING from text", "ontology learning"));
  EXPECT_FALSE(text::contains_icase("ontology", "learning"));
  EXPECT_TRUE(text::starts_with_icase("DOI:10.1/x", "doi:"));
}

TEST(Text, Utf8Helpers) {
  EXPECT_EQ(text::utf8_length("héllo"), 5u);
  EXPECT_EQ(text::utf8_prefix("héllo", 2), "hé");
  EXPECT_EQ(text::to_code_points("é").size(), 1u);
}

TEST(JsonIo, CsvEscape) {
  EXPECT_EQ(io::csv_escape("plain"), "plain");
  EXPECT_EQ(io::csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(JsonIo, MissingFileIsIoError) {
  try {
    io::read_file("/nonexistent/fedqa/file.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST(Error, CodeNamesAreSnakeCase) {
  EXPECT_EQ(code_name(ErrorCode::kEmptyQuery), "empty_query");
  EXPECT_EQ(code_name(ErrorCode::kSessionNotFound), "session_not_found");
  EXPECT_EQ(code_name(ErrorCode::kPromptTooLarge), "prompt_too_large");
}
