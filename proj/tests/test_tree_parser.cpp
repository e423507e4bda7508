#include <doctest.h>

#include "logdoc/tree_parser.hpp"
#include "logdoc/util.hpp"
#include "test_fixtures.hpp"

using namespace logdoc;

namespace {

std::vector<std::string> binding_values(const ParsedMessage& m, const std::string& name) {
  std::vector<std::string> out;
  for (const auto& b : m.bindings)
    if (b.name == name) out.push_back(b.value);
  return out;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace runs") {
  auto ts = tokenize("RECOVER  OF\tVOLUME vol1");
  CHECK(token_texts(ts) == std::vector<std::string>{"RECOVER", "OF", "VOLUME", "vol1"});
}

TEST_CASE("tokenize strips one trailing punctuation character") {
  auto ts = tokenize("TERMINATED, ERROR");
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].text == "TERMINATED");
  CHECK(ts[0].raw == "TERMINATED,");
  CHECK(ts[1].text == "ERROR");

  auto doubled = tokenize("x,,");
  REQUIRE(doubled.size() == 1);
  CHECK(doubled[0].text == "x,");  // only a single character comes off

  CHECK(tokenize(", ;").empty());  // bare punctuation tokens vanish
}

TEST_CASE("tokenize of the empty string is empty") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   ").empty());
}

TEST_CASE("tokenize strip set is configurable") {
  TokenizerConfig cfg;
  cfg.strip_chars = ":";
  auto ts = tokenize("time: 10:22:", cfg);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0].text == "time");
  CHECK(ts[1].text == "10:22");
}

TEST_CASE("parse_dfs resolves ARC0704E example 1") {
  auto def = testfix::arc0704e_definition();
  auto tokens = tokenize(testfix::arc0704e_example1());
  auto r = parse_dfs(def, tokens);
  REQUIRE(r);
  CHECK(binding_values(*r.message, "volser1") == std::vector<std::string>{"vol1"});
  CHECK(binding_values(*r.message, "volser2") == std::vector<std::string>{"vol2"});
  CHECK(r.message->selection ==
        SelectionPath{{SelectionStep::Kind::select, 0},
                      {SelectionStep::Kind::select, 0},
                      {SelectionStep::Kind::optional, 1}});
  CHECK(reconstruct_tokens(def, *r.message) == token_texts(tokens));
}

TEST_CASE("parse_dfs resolves ARC0704E example 2") {
  auto def = testfix::arc0704e_definition();
  auto tokens = tokenize(testfix::arc0704e_example2());
  auto r = parse_dfs(def, tokens);
  REQUIRE(r);
  CHECK(binding_values(*r.message, "volser1") == std::vector<std::string>{"vol1"});
  CHECK(binding_values(*r.message, "volser2").empty());
  CHECK(r.message->selection ==
        SelectionPath{{SelectionStep::Kind::select, 1},
                      {SelectionStep::Kind::select, 1},
                      {SelectionStep::Kind::optional, 0}});
}

TEST_CASE("parse_dfs reports NoMatch with the deepest failure position") {
  auto def = testfix::arc0704e_definition();
  auto r = parse_dfs(def, tokenize("ARC0704E HELLO"));
  CHECK_FALSE(r);
  CHECK(r.error.kind == ParseErrorKind::no_match);
  CHECK(r.error.position == 1);  // ARC0704E consumed, HELLO refused
}

TEST_CASE("parse_dfs leaves no partial bindings behind on failure") {
  auto def = testfix::arc0704e_definition();
  auto r = parse_dfs(def, tokenize("ARC0704E RECOVER OF VOLUME vol1 TERMINATED ERROR"));
  CHECK_FALSE(r);
}

TEST_CASE("optional prefers inclusion but backtracks cleanly") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential({SyntaxNode::keyword("A"),
                              SyntaxNode::optional({SyntaxNode::parameter("v")}),
                              SyntaxNode::parameter("w")}),
      {}};
  // two tokens after A: include wins and binds both parameters
  auto both = parse_dfs(def, testfix::simple_tokens({"A", "x", "y"}));
  REQUIRE(both);
  CHECK(binding_values(*both.message, "v") == std::vector<std::string>{"x"});
  CHECK(binding_values(*both.message, "w") == std::vector<std::string>{"y"});
  // one token: inclusion starves w, so exclusion is the surviving parse
  auto one = parse_dfs(def, testfix::simple_tokens({"A", "x"}));
  REQUIRE(one);
  CHECK(one.message->selection == SelectionPath{{SelectionStep::Kind::optional, 0}});
  CHECK(binding_values(*one.message, "w") == std::vector<std::string>{"x"});
}

TEST_CASE("extract_anchors finds the three ARC0704E anchors") {
  auto anchors = extract_anchors(testfix::arc0704e_definition());
  REQUIRE(anchors.size() == 3);
  CHECK(anchors[0].keywords == std::vector<std::string>{"OF", "VOLUME"});
  CHECK(anchors[0].first_child == 2);
  CHECK(anchors[0].last_child == 3);
  CHECK(anchors[1].keywords == std::vector<std::string>{"TERMINATED", "ERROR"});
  CHECK(anchors[2].keywords == std::vector<std::string>{"VTOC", "COPY", "DATA", "SET"});
}

TEST_CASE("extract_anchors needs runs of at least two") {
  MessageDefinition all_params{
      "T", SyntaxNode::sequential({SyntaxNode::parameter("a"), SyntaxNode::parameter("b")}), {}};
  CHECK(extract_anchors(all_params).empty());

  MessageDefinition broken{"T",
                           SyntaxNode::sequential({SyntaxNode::keyword("K1"),
                                                   SyntaxNode::parameter("p"),
                                                   SyntaxNode::keyword("K2")}),
                           {}};
  CHECK(extract_anchors(broken).empty());
}

TEST_CASE("recursive anchor mode absorbs keyword-only composites") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential(
          {SyntaxNode::keyword("K1"),
           SyntaxNode::sequential({SyntaxNode::keyword("K2"), SyntaxNode::keyword("K3")}),
           SyntaxNode::keyword("K4"), SyntaxNode::parameter("p")}),
      {}};
  CHECK(extract_anchors(def).size() == 0);  // composite breaks the run by default
  AnchorConfig recursive{true};
  auto anchors = extract_anchors(def, recursive);
  REQUIRE(anchors.size() == 1);
  CHECK(anchors[0].keywords == std::vector<std::string>{"K1", "K2", "K3", "K4"});
  CHECK(anchors[0].first_child == 0);
  CHECK(anchors[0].last_child == 2);
  // selects and optionals have no fixed keyword sequence, so they still break runs
  MessageDefinition opt{"T",
                        SyntaxNode::sequential(
                            {SyntaxNode::keyword("K1"),
                             SyntaxNode::optional({SyntaxNode::keyword("K2")}),
                             SyntaxNode::keyword("K3")}),
                        {}};
  CHECK(extract_anchors(opt, recursive).empty());
}

TEST_CASE("recursive anchors also parse, with the composite consumed by the anchor") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential(
          {SyntaxNode::keyword("K1"),
           SyntaxNode::sequential({SyntaxNode::keyword("K2"), SyntaxNode::keyword("K3")}),
           SyntaxNode::keyword("K4"), SyntaxNode::parameter("p")}),
      {}};
  AnchorConfig recursive{true};
  auto tokens = testfix::simple_tokens({"K1", "K2", "K3", "K4", "x", "y"});
  auto r = parse_with_anchors(def, tokens, recursive);
  REQUIRE(r);
  REQUIRE(r.message->bindings.size() == 1);
  CHECK(r.message->bindings[0].value == "x y");  // lone trailing parameter
  CHECK(reconstruct_tokens(def, *r.message) == token_texts(tokens));
}

TEST_CASE("parse_with_anchors matches parse_dfs on the worked examples") {
  auto def = testfix::arc0704e_definition();
  for (const char* line : {testfix::arc0704e_example1(), testfix::arc0704e_example2()}) {
    auto tokens = tokenize(line);
    auto anchored = parse_with_anchors(def, tokens);
    auto plain = parse_dfs(def, tokens);
    REQUIRE(anchored);
    REQUIRE(plain);
    CHECK(anchored.message->bindings == plain.message->bindings);
    CHECK(anchored.message->selection == plain.message->selection);
  }
}

TEST_CASE("a lone parameter between anchors absorbs multi-token values") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential({SyntaxNode::keyword("K1"), SyntaxNode::keyword("K2"),
                              SyntaxNode::parameter("msgtext"), SyntaxNode::keyword("K3"),
                              SyntaxNode::keyword("K4")}),
      {}};
  auto tokens = testfix::simple_tokens({"K1", "K2", "a", "b", "c", "K3", "K4"});
  auto anchored = parse_with_anchors(def, tokens);
  REQUIRE(anchored);
  REQUIRE(anchored.message->bindings.size() == 1);
  CHECK(anchored.message->bindings[0].name == "msgtext");
  CHECK(anchored.message->bindings[0].value == "a b c");
  CHECK(anchored.message->bindings[0].span == TokenSpan{2, 5});
  CHECK(reconstruct_tokens(def, *anchored.message) == token_texts(tokens));
  // plain DFS binds exactly one token per parameter, so it cannot accept this
  CHECK_FALSE(parse_dfs(def, tokens));
}

TEST_CASE("noise inside a parameter-only segment is absorbed, noise inside an anchor is not") {
  auto def = testfix::arc0704e_definition();
  // extra token next to vol1, which sits alone between two anchors
  auto noisy_value = tokenize(
      "ARC0704E RECOVER OF VOLUME vol1 junk TERMINATED, ERROR ALLOCATING VTOC COPY DATA SET ON "
      "VOLUME vol2");
  auto r = parse_with_anchors(def, noisy_value);
  REQUIRE(r);
  CHECK(binding_values(*r.message, "volser1") == std::vector<std::string>{"vol1 junk"});
  // the same token dropped into the TERMINATED/ERROR anchor breaks it
  auto noisy_anchor = tokenize(
      "ARC0704E RECOVER OF VOLUME vol1 TERMINATED junk ERROR ALLOCATING VTOC COPY DATA SET ON "
      "VOLUME vol2");
  auto bad = parse_with_anchors(def, noisy_anchor);
  CHECK_FALSE(bad);
  CHECK(bad.error.kind == ParseErrorKind::anchor_not_found);
}

TEST_CASE("two parameters in one segment cannot split surplus tokens") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential({SyntaxNode::keyword("K1"), SyntaxNode::keyword("K2"),
                              SyntaxNode::parameter("a"), SyntaxNode::parameter("b"),
                              SyntaxNode::keyword("K3"), SyntaxNode::keyword("K4")}),
      {}};
  // exact token count still parses deterministically
  auto exact = parse_with_anchors(def, testfix::simple_tokens({"K1", "K2", "x", "y", "K3", "K4"}));
  REQUIRE(exact);
  // a surplus token has no defined split
  auto surplus =
      parse_with_anchors(def, testfix::simple_tokens({"K1", "K2", "x", "y", "z", "K3", "K4"}));
  CHECK_FALSE(surplus);
  CHECK(surplus.error.kind == ParseErrorKind::segment_no_match);
  CHECK(surplus.error.segment == 1);
}

TEST_CASE("excluded optional under a lone-parameter region matches an empty segment") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential({SyntaxNode::keyword("K1"), SyntaxNode::keyword("K2"),
                              SyntaxNode::optional({SyntaxNode::parameter("note")}),
                              SyntaxNode::keyword("K3"), SyntaxNode::keyword("K4")}),
      {}};
  auto without = parse_with_anchors(def, testfix::simple_tokens({"K1", "K2", "K3", "K4"}));
  REQUIRE(without);
  CHECK(without.message->bindings.empty());
  CHECK(without.message->selection == SelectionPath{{SelectionStep::Kind::optional, 0}});
  auto with = parse_with_anchors(def, testfix::simple_tokens({"K1", "K2", "a", "b", "K3", "K4"}));
  REQUIRE(with);
  REQUIRE(with.message->bindings.size() == 1);
  CHECK(with.message->bindings[0].value == "a b");
  CHECK(with.message->selection == SelectionPath{{SelectionStep::Kind::optional, 1}});
}

TEST_CASE("parse_with_anchors falls back to DFS when a definition has no anchors") {
  MessageDefinition def{
      "T",
      SyntaxNode::sequential(
          {SyntaxNode::keyword("K1"), SyntaxNode::parameter("a"), SyntaxNode::keyword("K2")}),
      {}};
  auto r = parse_with_anchors(def, testfix::simple_tokens({"K1", "x", "K2"}));
  REQUIRE(r);
  CHECK(r.message->bindings.size() == 1);
}

TEST_CASE("anchor positions are strictly increasing") {
  auto def = testfix::arc0704e_definition();
  auto tokens = tokenize(testfix::arc0704e_example1());
  auto anchors = extract_anchors(def);
  // locate each anchor the way the parser does and check ordering
  std::size_t prev_end = 0;
  for (const auto& anchor : anchors) {
    bool found = false;
    for (std::size_t p = prev_end; p + anchor.keywords.size() <= tokens.size(); ++p) {
      bool all = true;
      for (std::size_t k = 0; k < anchor.keywords.size(); ++k)
        if (tokens[p + k].text != anchor.keywords[k]) {
          all = false;
          break;
        }
      if (all) {
        CHECK(p >= prev_end);
        prev_end = p + anchor.keywords.size();
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}
