// Built-in few-shot sets and task descriptions, transcribed as printed
// (including typos such as "Foucaults" and the double space in the
// "key technological changes" example).

#include <fmt/format.h>

#include "simgpt/error.hpp"
#include "simgpt/prompt.hpp"

namespace simgpt {

namespace {

constexpr const char* kNote =
    "Note that don't simply paraphrase or negate the given sentence, and we don't allow reuse "
    "the same sentence for many different prompts.";

std::string make_description(const char* intro, const char* unit) {
  return fmt::format(
      "{}\n\nWrite one {} definitely similar to the situation or event in the line.\n"
      "Write one {} definitely dissimilar to the situation or event in the line.\n\n{}",
      intro, unit, unit, kNote);
}

const std::vector<FewShotExample>& caption_examples() {
  static const std::vector<FewShotExample> examples = {
      {"This church choir sings to the masses as they sing joyous songs from the book at a church.",
       "The church is filled with song.", "A choir singing at a baseball game."},
      {"A woman with a green headscarf, blue shirt and a very big grin.",
       "The woman is very happy.", "The woman has been shot."},
      {"An old man with a package poses in front of an advertisement.",
       "A man poses in front of an ad.", "A man walks by an ad."},
      {"A statue at a museum that no seems to be looking at.",
       "There is a statue that not many people seem to be interested in.",
       "Tons of people are gathered around the statue."},
      {"A land rover is being driven across a river.", "A vehicle is crossing a river.",
       "A sedan is stuck in the middle of a river."},
      {"A man playing an electric guitar on stage.", "A man playing guitar on stage.",
       "A man playing banjo on the floor."},
      {"One tan girl with a wool hat is running and leaning over an object, while another person "
       "in a wool hat is sitting on the ground.",
       "A tan girl runs leans over an object.", "A boy runs into a wall."},
      {"Two teenage girls conversing next to lockers.", "People talking next to lockers.",
       "Girls talking next to the toilet."},
  };
  return examples;
}

const std::vector<FewShotExample>& caption_extra_examples() {
  static const std::vector<FewShotExample> examples = {
      {"A biker races.", "A person is riding a bike.", "The car is yellow."},
      {"A woman with a green headscarf, blue shirt and a very big grin.",
       "The woman is very happy.", "The woman has been shot."},
      {"A softball player throws the ball to her teammate.", "Two people are playing softball.",
       "Two softball players are sitting on a bench."},
      {"Island native fishermen reeling in their nets after a long day's work.",
       "The men are finishing their day of work.",
       "The men did not go to work today but instead played bridge."},
      {"Everyone on the street in the city seem to be busy doing their own thing,",
       "People are conducting business in the city.", "The people are watching what is happening."},
      {"People are on an escalator waiting to get to their destination while looking outside of "
       "the glass that makes up the wall.",
       "People are riding on the escalator.", "People are taking the elevator."},
      {"These are young adults who seem to be working together to protect the plants surrounding "
       "the white pole.",
       "The adults are young.", "The adults are old."},
      {"Children in yellow sports uniforms climbing a tower.", "Children in uniforms climb a tower.",
       "The kids crawl in sand."},
  };
  return examples;
}

const std::vector<FewShotExample>& question_examples() {
  static const std::vector<FewShotExample> examples = {
      {"How did Michel Foucault feel about surveillance society?",
       "What is Michel Foucaults opinion on surveillance society?",
       "What are the main ingredients in a traditional apple pie?"},
      {"At what time should I drink green tea to be fit?",
       "What is the best time to drink green tea for fitness?",
       "Does Lipton green tea Assist in weight loss?"},
      {"Is Quora becoming the new Facebook?", "Is Quora becoming a new Facebook?",
       "Does Quora have nothing in common with Facebook?"},
      {"Is 12 Mbps a good internet speed for streaming and gaming?",
       "Would I be able to stream and game effectively with a 12 Mbps internet connection?",
       "Is 6 Mbps download and 2 Mbps upload speed good for a 4G LTE connection?"},
      {"How can I increase my website page rank?", "How do I increase page rank of website?",
       "What techniques can lower my website's page rank?"},
      {"2 states movie download?", "Where can I download the movie \"2 States\"?",
       "Who controls the U.S president?"},
      {"What direction are you going when travelling from Malaga to Gibraltar?",
       "What direction are you travelling from malaga to gibralter?",
       "What direction are you going when travelling from Gibraltar to Malaga?"},
      {"Do animal cells have cell walls?", "Can you find cell walls in animal cells?",
       "Is anatomy destiny?"},
  };
  return examples;
}

// Multi-genre examples in the order of the multi-genre prompt.
const std::vector<FewShotExample>& multigenre_examples() {
  static const std::vector<FewShotExample> examples = {
      {"Your contribution helped make it possible for us to provide our students with a quality "
       "education.",
       "Your support helped us provide students with a quality education.",
       "Your contributions were of no help with our students' education."},
      {"They were promptly executed.", "They were executed.", "They were set free, uninjured."},
      {"The simplest is for one or more of the members to simply donate one million dollars to "
       "the IGGS Scholarship Fund.",
       "The simplest is for one million dollars to be donated by one of the members to the IGGS "
       "Scholarship Fund.",
       "The most complicated is to arrange a donation of one million dollars to the IGGS "
       "Scholarship Fund."},
      {"In the felled seams of shirts and jeans, for example, the visible stitches might be of a "
       "color designed to decorate the garment.",
       "The felled seams of shirts are visible.", "The felled seams of shirts are not visible."},
      {"In this competition for legitimacy, secular regimes had no alternative to offer.",
       "Secular regimes had little to off in way of legitimacy.",
       "Secular regimes had many options to offer."},
      {"In this period, a number of key technological changes  sewing machines that made many "
       "more stitches a minute, long knives instead of shears for cutting, and pressing machines.",
       "In this period, various key innovative changes, sewing machines that made numerous more "
       "lines a moment, long blades rather than shears for cutting, and squeezing machines.",
       "Industry tools and machineries have stayed the same until today."},
      {"At the end of the second year, children begin to label their own and others' internal "
       "states with words, such as want, happy, mad, think, and pretend.",
       "Usually by the end of the second year, children will begin to label their own and "
       "other's internal states with words.",
       "Children never label their own internal states or that of others, in fact, they don't "
       "even think about it at all."},
      {"Eleven, the first guy, he's heading towards Washington.", "Eleven is DC bound.",
       "The first one was bound for Boston."},
  };
  return examples;
}

// The cross-genre ablation pairs the caption description with the
// multi-genre examples in this order.
std::vector<FewShotExample> caption_multigenre_examples() {
  const auto& m = multigenre_examples();
  return {m[0], m[6], m[1], m[2], m[3], m[4], m[5], m[7]};
}

std::vector<IclShot> icl_shots_base() {
  return {
      {"a man with a hard hat is dancing .", "a man wearing a hard hat is dancing .", "5.0"},
      {"a woman is playing the guitar .", "a man is playing guitar .", "2.4"},
      {"people are playing cricket .", "men are playing cricket .", "3.2"},
      {"a man is speaking .", "a man is spitting .", "0.636"},
      {"a man is eating food .", "a man is eating something .", "4.2"},
      {"the man is riding a horse .", "a woman is using a hoe .", "0"},
      {"the boy is playing the piano .", "a band is playing on stage .", "1.333"},
      {"a man and a woman walk through the woods .", "the man and woman are walking .", "3.0"},
  };
}

std::vector<IclShot> icl_shots_16_extra() {
  return {
      {"the lady stirred up raw eggs in the bowl .", "a woman is pouring eyes into a bowl .", "1.0"},
      {"a cow is eating grass .", "a dog is pulling a girl down a hill .", "0.0"},
      {"the man stirred the sauce for the chicken .", "the man is stirring oil .", "2.4"},
      {"the lady cut the tail and body of a shrimp .", "a woman is cleaning a shrimp .", "4.5"},
      {"a person is peeling shrimp .", "a person is preparing shrimp .", "3.6"},
      {"the man is slicing a potato .", "a man is slicing potato .", "5.0"},
      {"ta man is cutting up a potato .", "a man is cutting up carrots .", "2.375"},
      {"the man is hiking in the woods .", "a man is tracking in the wood .", "3.0"},
  };
}

std::vector<IclShot> icl_shots_32_extra() {
  return {
      {"a man is playing guitar .", "a man plays a guitar .", "4.857"},
      {"the man is buttering the bread .", "the man is stirring the rice .", "0.4"},
      {"large silver locomotive engine in a shed .", "the silver train is parked in a station .",
       "2.6"},
      {"the back of a stop sign with many stickers on it .", "the back of a sign with stickers on .",
       "3.8"},
      {"a doubly decker red bus driving down the road .",
       "a red double decker bus driving down a street .", "5"},
      {"the black bird is sitting on the ground .",
       "the back of a pig under a tree with a cow in the background .", "0"},
      {"a black and white horned cow standing in a field .", "a large black and white cow in a field .",
       "4"},
      {"a red bird and four other birds sitting in the snow .", "five birds stand on the snow .",
       "2.8"},
      {"domestic cat looking out window .", "a white cat looking out of a window .", "3.6"},
      {"two kids are playing a game of foosball .", "the kids are playing a game with each other .",
       "3.4"},
      {"the man is in a deserted field .", "the man is outside in the field .", "4.0"},
      {"a musician is smearing jam on his white guitar at a concert .",
       "trombonist playing the her instrument in a band for a parade .", "0.4"},
      {"a pair of young boys in t-shirts are hiding in the woods with one looking aghast .",
       "two smiling little girls playing in a fountain with other people .", "0.0"},
      {"one football player tries to tackle a player on the opposing team .",
       "a football player attempts a tackle .", "4.6"},
      {"there are people out on the street .", "people are out on the street .", "5.0"},
      {"all we know is this : distant objects are receding from us at a rate proportional to "
       "their distance from us .",
       "the expansion of space means that objects in cosmological distances are receding away "
       "from each other .",
       "3.4"},
  };
}

}  // namespace

const std::string& builtin_task_description(Genre genre) {
  static const std::string caption = make_description(
      "This task will involve reading a line from a caption and writing two sentences that relate "
      "to it. Using only this description and what you know about the world:",
      "sentence that is");
  static const std::string question = make_description(
      "This task will involve reading a line from a question and writing two questions that "
      "relate to it. The line will describe a situation or event. Using only this description and "
      "what you know about the world:",
      "question is");
  static const std::string multigenre = make_description(
      "This task will involve reading a line from a non-fiction article and writing two sentences "
      "that relate to it. The line will describe a situation or event. Using only this "
      "description and what you know about the world:",
      "sentence that is");
  switch (genre) {
    case Genre::caption: return caption;
    case Genre::question: return question;
    case Genre::multigenre: return multigenre;
  }
  return caption;
}

const std::string& icl_task_description() {
  static const std::string description =
      "This task is the semantic textual similarity task. You will read two sentences and write a "
      "similarity score of them. The score ranges from 0 to 5, including decimal values, where 0 "
      "indicates no similarity and 5 represents the highest level of similarity.";
  return description;
}

PromptSpec builtin_prompt_spec(Genre genre, PromptVariant variant) {
  switch (variant) {
    case PromptVariant::default8:
      switch (genre) {
        case Genre::caption:
          return PromptSpec(genre, builtin_task_description(genre), caption_examples());
        case Genre::question:
          return PromptSpec(genre, builtin_task_description(genre), question_examples());
        case Genre::multigenre:
          return PromptSpec(genre, builtin_task_description(genre), multigenre_examples());
      }
      break;
    case PromptVariant::caption16:
      if (genre == Genre::caption) {
        auto examples = caption_extra_examples();
        const auto& base = caption_examples();
        examples.insert(examples.end(), base.begin(), base.end());
        return PromptSpec(genre, builtin_task_description(genre), std::move(examples));
      }
      break;
    case PromptVariant::caption_multigenre8:
      if (genre == Genre::caption) {
        return PromptSpec(genre, builtin_task_description(Genre::caption),
                          caption_multigenre_examples());
      }
      break;
  }
  throw Error(ErrorCode::invalid_argument,
              fmt::format("prompt variant '{}' is not available for genre '{}'", to_string(variant),
                          to_string(genre)));
}

std::vector<IclShot> builtin_icl_shots(int shots) {
  auto out = icl_shots_base();
  if (shots == 8) return out;
  auto extra = icl_shots_16_extra();
  out.insert(out.end(), extra.begin(), extra.end());
  if (shots == 16) return out;
  auto more = icl_shots_32_extra();
  out.insert(out.end(), more.begin(), more.end());
  if (shots == 32) return out;
  throw Error(ErrorCode::invalid_argument,
              fmt::format("no built-in in-context shot set of size {} (expected 8, 16 or 32)", shots));
}

}  // namespace simgpt
