//! Embedded emoji → short-name table.
//!
//! Names are lowercase ASCII words (`[a-z0-9_]` only) so that a replaced
//! emoji survives downstream tokenization as a single token. The table
//! covers the emoji that dominate social-media text: the core face block,
//! hands and gestures, hearts, and common symbols, plus the skin-tone
//! modifiers. Codepoints outside the table pass through cleaning
//! untouched.

/// Sorted by codepoint; looked up by binary search.
pub(crate) static EMOJI_TABLE: &[(char, &str)] = &[
    ('\u{2620}', "skull_and_crossbones"),
    ('\u{2639}', "frowning_face"),
    ('\u{263A}', "smiling_face"),
    ('\u{26A0}', "warning"),
    ('\u{26BD}', "soccer_ball"),
    ('\u{26D4}', "no_entry"),
    ('\u{2705}', "check_mark_button"),
    ('\u{270A}', "raised_fist"),
    ('\u{270B}', "raised_hand"),
    ('\u{270C}', "victory_hand"),
    ('\u{2728}', "sparkles"),
    ('\u{274C}', "cross_mark"),
    ('\u{2753}', "question_mark"),
    ('\u{2757}', "exclamation_mark"),
    ('\u{2764}', "red_heart"),
    ('\u{2B50}', "star"),
    ('\u{1F31F}', "glowing_star"),
    ('\u{1F389}', "party_popper"),
    ('\u{1F38A}', "confetti_ball"),
    ('\u{1F3C6}', "trophy"),
    ('\u{1F3FB}', "light_skin_tone"),
    ('\u{1F3FC}', "medium_light_skin_tone"),
    ('\u{1F3FD}', "medium_skin_tone"),
    ('\u{1F3FE}', "medium_dark_skin_tone"),
    ('\u{1F3FF}', "dark_skin_tone"),
    ('\u{1F440}', "eyes"),
    ('\u{1F441}', "eye"),
    ('\u{1F442}', "ear"),
    ('\u{1F443}', "nose"),
    ('\u{1F444}', "mouth"),
    ('\u{1F445}', "tongue"),
    ('\u{1F446}', "backhand_index_pointing_up"),
    ('\u{1F447}', "backhand_index_pointing_down"),
    ('\u{1F448}', "backhand_index_pointing_left"),
    ('\u{1F449}', "backhand_index_pointing_right"),
    ('\u{1F44A}', "oncoming_fist"),
    ('\u{1F44B}', "waving_hand"),
    ('\u{1F44C}', "ok_hand"),
    ('\u{1F44D}', "thumbs_up"),
    ('\u{1F44E}', "thumbs_down"),
    ('\u{1F44F}', "clapping_hands"),
    ('\u{1F450}', "open_hands"),
    ('\u{1F47B}', "ghost"),
    ('\u{1F47D}', "alien"),
    ('\u{1F47F}', "angry_face_with_horns"),
    ('\u{1F480}', "skull"),
    ('\u{1F493}', "beating_heart"),
    ('\u{1F494}', "broken_heart"),
    ('\u{1F495}', "two_hearts"),
    ('\u{1F496}', "sparkling_heart"),
    ('\u{1F497}', "growing_heart"),
    ('\u{1F498}', "heart_with_arrow"),
    ('\u{1F499}', "blue_heart"),
    ('\u{1F49A}', "green_heart"),
    ('\u{1F49B}', "yellow_heart"),
    ('\u{1F49C}', "purple_heart"),
    ('\u{1F49D}', "heart_with_ribbon"),
    ('\u{1F49E}', "revolving_hearts"),
    ('\u{1F49F}', "heart_decoration"),
    ('\u{1F4A1}', "light_bulb"),
    ('\u{1F4A2}', "anger_symbol"),
    ('\u{1F4A3}', "bomb"),
    ('\u{1F4A4}', "zzz"),
    ('\u{1F4A5}', "collision"),
    ('\u{1F4A6}', "sweat_droplets"),
    ('\u{1F4A8}', "dashing_away"),
    ('\u{1F4A9}', "pile_of_poo"),
    ('\u{1F4AA}', "flexed_biceps"),
    ('\u{1F4AB}', "dizzy"),
    ('\u{1F4AC}', "speech_balloon"),
    ('\u{1F4AD}', "thought_balloon"),
    ('\u{1F4AF}', "hundred_points"),
    ('\u{1F525}', "fire"),
    ('\u{1F590}', "hand_with_fingers_splayed"),
    ('\u{1F595}', "middle_finger"),
    ('\u{1F5A4}', "black_heart"),
    ('\u{1F600}', "grinning_face"),
    ('\u{1F601}', "beaming_face_with_smiling_eyes"),
    ('\u{1F602}', "face_with_tears_of_joy"),
    ('\u{1F603}', "grinning_face_with_big_eyes"),
    ('\u{1F604}', "grinning_face_with_smiling_eyes"),
    ('\u{1F605}', "grinning_face_with_sweat"),
    ('\u{1F606}', "grinning_squinting_face"),
    ('\u{1F607}', "smiling_face_with_halo"),
    ('\u{1F608}', "smiling_face_with_horns"),
    ('\u{1F609}', "winking_face"),
    ('\u{1F60A}', "smiling_face_with_smiling_eyes"),
    ('\u{1F60B}', "face_savoring_food"),
    ('\u{1F60C}', "relieved_face"),
    ('\u{1F60D}', "smiling_face_with_heart_eyes"),
    ('\u{1F60E}', "smiling_face_with_sunglasses"),
    ('\u{1F60F}', "smirking_face"),
    ('\u{1F610}', "neutral_face"),
    ('\u{1F611}', "expressionless_face"),
    ('\u{1F612}', "unamused_face"),
    ('\u{1F613}', "downcast_face_with_sweat"),
    ('\u{1F614}', "pensive_face"),
    ('\u{1F615}', "confused_face"),
    ('\u{1F616}', "confounded_face"),
    ('\u{1F617}', "kissing_face"),
    ('\u{1F618}', "face_blowing_a_kiss"),
    ('\u{1F619}', "kissing_face_with_smiling_eyes"),
    ('\u{1F61A}', "kissing_face_with_closed_eyes"),
    ('\u{1F61B}', "face_with_tongue"),
    ('\u{1F61C}', "winking_face_with_tongue"),
    ('\u{1F61D}', "squinting_face_with_tongue"),
    ('\u{1F61E}', "disappointed_face"),
    ('\u{1F61F}', "worried_face"),
    ('\u{1F620}', "angry_face"),
    ('\u{1F621}', "enraged_face"),
    ('\u{1F622}', "crying_face"),
    ('\u{1F623}', "persevering_face"),
    ('\u{1F624}', "face_with_steam_from_nose"),
    ('\u{1F625}', "sad_but_relieved_face"),
    ('\u{1F626}', "frowning_face_with_open_mouth"),
    ('\u{1F627}', "anguished_face"),
    ('\u{1F628}', "fearful_face"),
    ('\u{1F629}', "weary_face"),
    ('\u{1F62A}', "sleepy_face"),
    ('\u{1F62B}', "tired_face"),
    ('\u{1F62C}', "grimacing_face"),
    ('\u{1F62D}', "loudly_crying_face"),
    ('\u{1F62E}', "face_with_open_mouth"),
    ('\u{1F62F}', "hushed_face"),
    ('\u{1F630}', "anxious_face_with_sweat"),
    ('\u{1F631}', "face_screaming_in_fear"),
    ('\u{1F632}', "astonished_face"),
    ('\u{1F633}', "flushed_face"),
    ('\u{1F634}', "sleeping_face"),
    ('\u{1F635}', "face_with_crossed_out_eyes"),
    ('\u{1F636}', "face_without_mouth"),
    ('\u{1F637}', "face_with_medical_mask"),
    ('\u{1F638}', "grinning_cat_with_smiling_eyes"),
    ('\u{1F639}', "cat_with_tears_of_joy"),
    ('\u{1F63A}', "grinning_cat"),
    ('\u{1F63B}', "smiling_cat_with_heart_eyes"),
    ('\u{1F63C}', "cat_with_wry_smile"),
    ('\u{1F63D}', "kissing_cat"),
    ('\u{1F63E}', "pouting_cat"),
    ('\u{1F63F}', "crying_cat"),
    ('\u{1F640}', "weary_cat"),
    ('\u{1F641}', "slightly_frowning_face"),
    ('\u{1F642}', "slightly_smiling_face"),
    ('\u{1F643}', "upside_down_face"),
    ('\u{1F644}', "face_with_rolling_eyes"),
    ('\u{1F645}', "person_gesturing_no"),
    ('\u{1F646}', "person_gesturing_ok"),
    ('\u{1F647}', "person_bowing"),
    ('\u{1F648}', "see_no_evil_monkey"),
    ('\u{1F649}', "hear_no_evil_monkey"),
    ('\u{1F64A}', "speak_no_evil_monkey"),
    ('\u{1F64B}', "person_raising_hand"),
    ('\u{1F64C}', "raising_hands"),
    ('\u{1F64D}', "person_frowning"),
    ('\u{1F64E}', "person_pouting"),
    ('\u{1F64F}', "folded_hands"),
    ('\u{1F680}', "rocket"),
    ('\u{1F6A8}', "police_car_light"),
    ('\u{1F6AB}', "prohibited"),
    ('\u{1F90D}', "white_heart"),
    ('\u{1F90E}', "brown_heart"),
    ('\u{1F910}', "zipper_mouth_face"),
    ('\u{1F911}', "money_mouth_face"),
    ('\u{1F912}', "face_with_thermometer"),
    ('\u{1F913}', "nerd_face"),
    ('\u{1F914}', "thinking_face"),
    ('\u{1F915}', "face_with_head_bandage"),
    ('\u{1F916}', "robot"),
    ('\u{1F917}', "smiling_face_with_open_hands"),
    ('\u{1F918}', "sign_of_the_horns"),
    ('\u{1F919}', "call_me_hand"),
    ('\u{1F91D}', "handshake"),
    ('\u{1F91E}', "crossed_fingers"),
    ('\u{1F923}', "rolling_on_the_floor_laughing"),
    ('\u{1F924}', "drooling_face"),
    ('\u{1F925}', "lying_face"),
    ('\u{1F927}', "sneezing_face"),
    ('\u{1F928}', "face_with_raised_eyebrow"),
    ('\u{1F929}', "star_struck"),
    ('\u{1F92A}', "zany_face"),
    ('\u{1F92B}', "shushing_face"),
    ('\u{1F92C}', "face_with_symbols_on_mouth"),
    ('\u{1F92D}', "face_with_hand_over_mouth"),
    ('\u{1F92E}', "face_vomiting"),
    ('\u{1F92F}', "exploding_head"),
    ('\u{1F970}', "smiling_face_with_hearts"),
    ('\u{1F971}', "yawning_face"),
    ('\u{1F972}', "smiling_face_with_tear"),
    ('\u{1F973}', "partying_face"),
    ('\u{1F974}', "woozy_face"),
    ('\u{1F975}', "hot_face"),
    ('\u{1F976}', "cold_face"),
    ('\u{1F97A}', "pleading_face"),
    ('\u{1F9D0}', "face_with_monocle"),
    ('\u{1F9E1}', "orange_heart"),
];

/// Short textual name of an emoji codepoint, if it is in the table.
pub(crate) fn short_name(c: char) -> Option<&'static str> {
    EMOJI_TABLE
        .binary_search_by_key(&c, |&(cp, _)| cp)
        .ok()
        .map(|idx| EMOJI_TABLE[idx].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_sorted_and_names_are_ascii_words() {
        for pair in EMOJI_TABLE.windows(2) {
            assert!(pair[0].0 < pair[1].0, "table must be strictly sorted");
        }
        for &(_, name) in EMOJI_TABLE {
            assert!(!name.is_empty());
            assert!(
                name.chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'),
                "bad name {name:?}"
            );
        }
    }

    #[test]
    fn lookup_hits_and_misses() {
        assert_eq!(short_name('\u{1F600}'), Some("grinning_face"));
        assert_eq!(short_name('\u{1F525}'), Some("fire"));
        assert_eq!(short_name('a'), None);
        assert_eq!(short_name('\u{200D}'), None);
    }
}
