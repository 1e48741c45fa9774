#include "fixture.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <string_view>

#include <drugrec/rng.hpp>

namespace drugrec::testing {

namespace {

struct ConditionDrugs {
  std::string_view condition;
  std::array<std::string_view, 4> drugs;
};

constexpr std::array<ConditionDrugs, 8> kConditions = {{
    {"Birth Control", {"Levonorgestrel", "Etonogestrel", "Ethinyl estradiol / norethindrone", "Nexplanon"}},
    {"Depression", {"Sertraline", "Escitalopram", "Bupropion", "Venlafaxine"}},
    {"Pain", {"Tramadol", "Oxycodone", "Ibuprofen", "Gabapentin"}},
    {"Anxiety", {"Buspirone", "Lorazepam", "Alprazolam", "Hydroxyzine"}},
    {"Acne", {"Doxycycline", "Tretinoin", "Spironolactone", "Isotretinoin"}},
    {"Bipolar Disorde", {"Lamotrigine", "Quetiapine", "Lithium", "Aripiprazole"}},
    {"Insomnia", {"Zolpidem", "Trazodone", "Melatonin", "Doxepin"}},
    {"Weight Loss", {"Phentermine", "Contrave", "Qsymia", "Liraglutide"}},
}};

constexpr std::array<std::string_view, 12> kPositive = {
    "This medicine worked great for me",     "I feel so much better now",
    "Amazing results after two weeks",       "highly recommend it to anyone",
    "no side effects at all, very happy",    "it really helped my symptoms",
    "I&#039;m finally sleeping well",        "Best decision I ever made",
    "effective and easy to take",            "my doctor was right, it works",
    "I love how calm I feel",                "Great relief within days!"};

constexpr std::array<std::string_view, 12> kNegative = {
    "This was terrible for me",               "I felt worse than before",
    "horrible nausea and headaches",          "would not recommend it",
    "it did not help at all",                 "awful side effects, I stopped",
    "I&#039;m so disappointed",               "Worst experience with any drug",
    "made my anxiety much worse",             "painful cramps every day",
    "I gained weight and felt sick",          "Useless and expensive."};

constexpr std::array<std::string_view, 6> kFiller = {
    "I started taking it last month.", "My doctor prescribed \"\"the usual dose\"\".",
    "I have been on it for a year.",   "Took it every morning.",
    "I tried two other options first.", "The pharmacy had it in stock."};

constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",   "May",      "June",
                                                      "July",    "August",   "September", "October", "November", "December"};

}  // namespace

std::string fixture_tsv(const FixtureOptions& options) {
  Rng rng(derive_seed(options.seed, 0xf17));
  std::ostringstream out;
  out << "\tdrugName\tcondition\treview\trating\tdate\tusefulCount\n";
  for (std::size_t i = 0; i < options.rows; ++i) {
    const auto& cd = kConditions[rng.uniform_index(kConditions.size())];
    const std::size_t drug = rng.uniform_index(cd.drugs.size());
    // Drugs earlier in each list are better liked, giving the recommender a signal.
    const double p_positive = 0.85 - 0.15 * static_cast<double>(drug);
    const bool positive = rng.uniform01() < p_positive;
    const int rating = positive ? 6 + static_cast<int>(rng.uniform_index(5)) : 1 + static_cast<int>(rng.uniform_index(5));

    const auto& pool = positive ? kPositive : kNegative;
    std::string review = "\"\"";
    review += kFiller[rng.uniform_index(kFiller.size())];
    const std::size_t phrases = 1 + rng.uniform_index(3);
    for (std::size_t k = 0; k < phrases; ++k) {
      review += ' ';
      review += pool[rng.uniform_index(pool.size())];
      review += '.';
    }
    // A minority of reviews carry a phrase from the other pool.
    if (rng.uniform01() < 0.15) {
      review += " But ";
      review += (positive ? kNegative : kPositive)[rng.uniform_index(kNegative.size())];
      review += '.';
    }
    review += "\"\"";

    std::string condition(cd.condition);
    if (options.include_dirty_rows && i % 50 == 49) condition.clear();
    if (options.include_dirty_rows && i % 97 == 96) condition = "3</span> users found this comment helpful.";

    const std::size_t useful = rng.uniform_index(120) + (positive ? rng.uniform_index(80) : 0);
    out << (100000 + i) << '\t' << cd.drugs[drug] << '\t' << condition << "\t\"" << review << "\"\t" << rating
        << ".0\t" << kMonths[rng.uniform_index(12)] << ' ' << (1 + rng.uniform_index(28)) << ", "
        << (2008 + rng.uniform_index(10)) << '\t' << useful << '\n';
  }
  return out.str();
}

void write_fixture(const std::filesystem::path& path, const FixtureOptions& options) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << fixture_tsv(options);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("drugrec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace drugrec::testing
