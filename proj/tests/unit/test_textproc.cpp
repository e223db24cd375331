#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "hsc/error.hpp"
#include "hsc/textproc.hpp"

using namespace hsc;

namespace {

std::string join(const TokenSequence& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("Photovoltaic cell panel"), (TokenSequence{"photovoltaic", "cell", "panel"}));
  EXPECT_EQ(tokenize(""), TokenSequence{});
  EXPECT_EQ(tokenize("135W, 22.1V"), (TokenSequence{"135w", "22.1v"}));
}

TEST(Tokenize, PunctuationRules) {
  EXPECT_EQ(tokenize("(Si) \"Tedlar EVA\", end."), (TokenSequence{"si", "tedlar", "eva", "end"}));
  EXPECT_EQ(tokenize("1,000 units; 13.5kg"), (TokenSequence{"1,000", "units", "13.5kg"}));
  EXPECT_EQ(tokenize("light-emitting"), (TokenSequence{"light", "emitting"}));
  EXPECT_EQ(tokenize("a ‖ b"), (TokenSequence{"a", "b"}));
  EXPECT_EQ(tokenize("   \t\n"), TokenSequence{});
}

TEST(Tokenize, NonAsciiScripts) {
  EXPECT_EQ(tokenize("ÉLECTRIQUE Ünit"), (TokenSequence{"électrique", "ünit"}));
  EXPECT_EQ(tokenize("ΔΙΟΔΟΣ Диод"), (TokenSequence{"διοδοσ", "диод"}));
  EXPECT_EQ(tokenize("태양광 패널, 모듈"), (TokenSequence{"태양광", "패널", "모듈"}));
}

TEST(Tokenize, IdempotentProperty) {
  const std::string alphabet = "abcXYZ019 .,;-()\"'\t\n";
  const std::vector<std::string> extra = {"é", "Ж", "‖", "—", "패"};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 6 == 0) {
        s += extra[rng() % extra.size()];
      } else {
        s.push_back(alphabet[rng() % alphabet.size()]);
      }
    }
    const auto once = tokenize(s);
    EXPECT_EQ(tokenize(s), once);
    EXPECT_EQ(tokenize(join(once)), once) << s;
    for (const auto& t : once) {
      EXPECT_FALSE(t.empty());
      EXPECT_EQ(t.find_first_of(" \t\n"), std::string::npos);
    }
  }
}

TEST(Stopwords, DefaultList) {
  const auto& sw = default_stopwords();
  EXPECT_GE(sw.size(), 100u);
  EXPECT_LE(sw.size(), 160u);
  for (const char* w : {"the", "and", "with", "of", "a"}) EXPECT_TRUE(sw.count(w)) << w;
  EXPECT_FALSE(sw.count("panel"));
}

TEST(Stopwords, ReadFile) {
  std::istringstream in("# comment\nThe\n\nfoo\n");
  EXPECT_EQ(read_stopwords(in), (StopwordSet{"the", "foo"}));
}

TEST(Idf, Examples) {
  const std::vector<TokenSequence> docs = {{"a", "b"}, {"a"}, {"a", "c"}, {"a", "c"}};
  const auto idf = compute_idf(docs);
  EXPECT_EQ(idf.document_count(), 4u);
  EXPECT_DOUBLE_EQ(idf.idf("a"), 0.0);
  EXPECT_NEAR(idf.idf("b"), 1.3862943611198906, 1e-12);
  EXPECT_NEAR(idf.idf("zzz"), std::log(4.0), 1e-12);
  EXPECT_NEAR(idf.idf("c"), std::log(2.0), 1e-12);
  EXPECT_EQ(idf.document_frequency("c"), 2u);
}

TEST(Idf, RepeatedTokensCountOncePerDocument) {
  const std::vector<TokenSequence> docs = {{"a", "a", "a"}, {"b"}};
  EXPECT_EQ(compute_idf(docs).document_frequency("a"), 1u);
}

TEST(Idf, Empty) { EXPECT_THROW(compute_idf(std::vector<TokenSequence>{}), EmptyInput); }

TEST(Idf, MonotoneProperty) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenSequence> docs(1 + rng() % 12);
    for (auto& d : docs) {
      for (int k = 0; k < 5; ++k) d.push_back(std::string(1, static_cast<char>('a' + rng() % 8)));
    }
    const auto idf = compute_idf(docs);
    for (char x = 'a'; x < 'i'; ++x) {
      for (char y = 'a'; y < 'i'; ++y) {
        const std::string tx(1, x), ty(1, y);
        EXPECT_GE(idf.idf(tx), 0.0);
        if (idf.document_frequency(tx) && idf.document_frequency(ty) &&
            idf.document_frequency(tx) <= idf.document_frequency(ty)) {
          EXPECT_GE(idf.idf(tx), idf.idf(ty));
        }
      }
    }
  }
}

TEST(Cosine, Examples) {
  const std::vector<double> u = {1, 2, 3}, e1 = {1, 0, 0}, e2 = {0, 1, 0}, zero = {0, 0, 0};
  EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
  EXPECT_DOUBLE_EQ(cosine(zero, u), 0.0);
  EXPECT_THROW(cosine(u, std::vector<double>{1, 2}), DimensionMismatch);
}

TEST(Cosine, SymmetricAndBoundedProperty) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> logscale(-200, 200);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> u(1 + rng() % 6), v;
    const double s = std::pow(10.0, logscale(rng) / 10.0);
    for (auto& x : u) x = normal(rng) * s;
    v = u;
    if (trial % 3) {
      for (auto& x : v) x = normal(rng) * s;
    } else {
      for (auto& x : v) x *= 7.0;
    }
    EXPECT_EQ(cosine(u, v), cosine(v, u));
    EXPECT_LE(std::abs(cosine(u, v)), 1.0 + 1e-12);
  }
}

TEST(ContentKeywords, Examples) {
  const auto idf = compute_idf(std::vector<TokenSequence>{{"solar", "panel", "the"}, {"glass"}});
  EXPECT_TRUE(content_keywords({"the", "and", "of"}, idf, default_stopwords()).empty());
  EXPECT_EQ(content_keywords({"solar", "panel", "the"}, idf, StopwordSet{"the"}), (KeywordSet{"solar", "panel"}));
}

TEST(ContentKeywords, PhotovoltaicDescription) {
  const auto tokens = tokenize(fixtures::kPhotovoltaicDescription);
  const auto idf = compute_idf(std::vector<TokenSequence>{tokens});
  const auto kw = content_keywords(tokens, idf, default_stopwords());
  for (const char* w : {"and", "with", "of"}) EXPECT_FALSE(kw.count(w)) << w;
  for (const char* w : {"photovoltaic", "silicon", "135w", "22.1v"}) EXPECT_TRUE(kw.count(w)) << w;
}

TEST(ContentKeywords, IdfFloor) {
  const auto idf = compute_idf(std::vector<TokenSequence>{{"common", "rare"}, {"common"}});
  EXPECT_EQ(content_keywords({"common", "rare"}, idf, {}, 0.5), KeywordSet{"rare"});
  EXPECT_EQ(content_keywords({"common", "rare"}, idf, {}), (KeywordSet{"common", "rare"}));
}

TEST(WordVectors, ReadWithAndWithoutHeader) {
  std::istringstream with("2 3\nfoo 1 2 3\nbar 0.5 -1e-3 4\n");
  const auto a = read_word_vectors(with, "v");
  EXPECT_EQ(a.dimension(), 3u);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_DOUBLE_EQ(a.vector("bar")[1], -1e-3);
  std::istringstream without("foo 1 2 3\nbar 0.5 -1e-3 4\n");
  const auto b = read_word_vectors(without, "v");
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b.tokens(), a.tokens());
  EXPECT_TRUE(b.vector("unknown").size() == 3 && b.vector("unknown")[0] == 0.0);
}

TEST(WordVectors, RaggedRows) {
  std::istringstream in("foo 1 2 3\nbar 1 2\n");
  try {
    read_word_vectors(in, "v");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(WordVectors, RoundTripExact) {
  const auto table = fixtures::fixture_vectors();
  std::ostringstream out;
  write_word_vectors(out, table);
  std::istringstream in(out.str());
  const auto back = read_word_vectors(in, "v");
  ASSERT_EQ(back.tokens(), table.tokens());
  for (const auto& t : table.tokens()) {
    const auto x = table.vector(t), y = back.vector(t);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin()));
  }
}

TEST(WordVectors, WrongDimensionInsert) {
  WordVectorTable t(3);
  EXPECT_THROW(t.insert("x", std::vector<double>{1, 2}), DimensionMismatch);
}
